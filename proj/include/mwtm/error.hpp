#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mwtm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

class InvalidRule : public Error {
public:
    using Error::Error;
};

/// A graph or state-space construction exceeded its configured cap.
class ResourceLimit : public Error {
public:
    ResourceLimit(const std::string& what, std::size_t cap, std::size_t depth)
        : Error(what + " (cap " + std::to_string(cap) + ", depth " + std::to_string(depth) + ")"),
          cap_(cap), depth_(depth) {}

    std::size_t cap() const { return cap_; }
    std::size_t depth() const { return depth_; }

private:
    std::size_t cap_;
    std::size_t depth_;
};

class DepthInsufficient : public Error {
public:
    using Error::Error;
};

class NonComposablePath : public Error {
public:
    using Error::Error;
};

/// Rule-text parse failure; `position()` is the 0-based character offset.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t position)
        : Error("at column " + std::to_string(position + 1) + ": " + message), position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

} // namespace mwtm
