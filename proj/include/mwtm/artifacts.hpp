#pragma once

// Multispace coordinates and plain-text export formats.

#include <iosfwd>
#include <string>
#include <vector>

#include "mwtm/causal.hpp"
#include "mwtm/finite_tape.hpp"
#include "mwtm/multiway.hpp"

namespace mwtm {

inline constexpr const char* kGraphSchema = "mwtm-graph/1";

/// Per node: x = head position, t = layer, b = log_k(1 + N) where N is the
/// tape window read as a base-k numeral (leftmost cell most significant).
/// `order` ranks the nodes of each layer by (b, canonical configuration order).
struct MultispaceCoordinates {
    std::vector<std::int64_t> x;
    std::vector<std::uint32_t> t;
    std::vector<double> b;
    std::vector<std::uint32_t> order;
};

/// With `radix_at_head` the numeral's units digit is the cell under the head.
MultispaceCoordinates assign_multispace(const MultiwayGraph& g, bool radix_at_head = false);

enum class GraphFormat { dot, json, edgelist };
std::string to_string(GraphFormat f);
GraphFormat parse_graph_format(const std::string& text);

/// Text of a configuration: "state@pos [begin:cells]".
std::string describe(const Configuration& c);

void export_graph(std::ostream& out, const MultiwayGraph& g, GraphFormat format);
void export_graph(std::ostream& out, const StateTransitionGraph& g, GraphFormat format);
void export_graph(std::ostream& out, const CausalGraph& g, GraphFormat format);
void export_graph(std::ostream& out, const BranchialGraph& g, const MultiwayGraph& source, GraphFormat format);

/// Inverse of the JSON multiway export.
MultiwayGraph import_graph_json(std::istream& in);

/// ASCII PGM, maxval 255, pixel = round(255 v / (k - 1)); halted rows are
/// drawn at half intensity (rounded down).
void export_raster(std::ostream& out, const std::vector<std::vector<Rational>>& rows, int k,
                   const std::vector<bool>& halted = {});
std::vector<std::vector<Rational>> raster_rows(const TapeStack& stack);

std::string confluence_table_tsv(const std::vector<ConfluenceCell>& cells);

/// Writes `text` to `path`, or to stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text);

} // namespace mwtm
