#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "qgraph/decoration.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

// JSON graph format:
//   {
//     "vertices": [{"id": "v1", "condition": "kirchhoff"}, ...],
//     "edges": [{"id": "e1", "start": "v1", "end": "v2",
//                "length": 1.0, "shift": [1, 0]}, ...],
//     "period_rank": 2,
//     "uniformity": 0.5            // optional
//   }
// "shift" may be omitted on finite graphs. A decoration file adds
//   "boundary": ["b1", "b2", ...]
// An attachment file maps base vertex ids to slot lists:
//   {"v": [{"edge": "e1", "end": "start", "boundary_vertex": "b1"}, ...]}
// Lengths are written at full precision so files round-trip exactly.

MetricGraph read_graph(std::istream& in);
MetricGraph read_graph_file(const std::filesystem::path& path);
void write_graph(std::ostream& out, const MetricGraph& g);
void write_graph_file(const std::filesystem::path& path, const MetricGraph& g);

Decoration read_decoration(std::istream& in);
Decoration read_decoration_file(const std::filesystem::path& path);
void write_decoration(std::ostream& out, const Decoration& dec);
void write_decoration_file(const std::filesystem::path& path, const Decoration& dec);

AttachmentMap read_attachment(std::istream& in);
AttachmentMap read_attachment_file(const std::filesystem::path& path);

// Shortest representation that parses back to the same double.
std::string format_full(double v);
// Fixed 12 significant digits, used for all numeric result output.
std::string format_sig(double v);

}  // namespace qgraph
