#pragma once

#include <map>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// A decoration: a finite metric graph together with an ordered list of
// boundary vertices. When a d-regular graph is decorated, every vertex is
// replaced by a copy of `graph` and the d former edge ends are reattached to
// the d boundary vertices.
struct Decoration {
  MetricGraph graph;
  std::vector<std::string> boundary;

  int boundary_size() const { return static_cast<int>(boundary.size()); }
  int boundary_index(const std::string& vertex) const;  // -1 when absent
};

// One reattachment: the given end of a former edge of the base graph lands on
// `boundary_vertex` of the decoration copy.
struct AttachmentSlot {
  std::string edge_id;
  bool at_end = false;
  std::string boundary_vertex;
};

// Per-vertex attachment: base vertex id -> how each incident edge end maps to
// a boundary vertex. Each incident end must appear exactly once and each
// boundary vertex must be used exactly once.
using AttachmentMap = std::map<std::string, std::vector<AttachmentSlot>>;

// Default policy: the incident ends of each vertex, sorted by
// (edge id, start-before-end), are paired with dec.boundary in order.
AttachmentMap sorted_attachment(const MetricGraph& base, const Decoration& dec);

// Replaces every vertex of the finite d-regular base graph by a fresh copy of
// the decoration. Resulting vertex conditions are all Kirchhoff. Vertex and
// edge ids of decoration copies are namespaced "<base vertex>/<id>".
// attach == nullptr selects the sorted policy.
MetricGraph decorate(const MetricGraph& base, const Decoration& dec,
                     const AttachmentMap* attach = nullptr);

// Same for a periodic base graph: base edges keep their shift vectors,
// decoration edges get zero shift.
MetricGraph decorate_periodic(const MetricGraph& base, const Decoration& dec,
                              const AttachmentMap* attach = nullptr);

// Spider decoration with `degree` boundary vertices b1..bd: an odd cycle of
// cycle_size edges of length l0 through b1..b_c, plus pendant edges b1-bj of
// length l0 for the remaining boundary vertices. Requires degree >= 3,
// cycle_size odd with 3 <= cycle_size <= degree, l0 > 0.
Decoration make_spider(int degree, double l0, int cycle_size);

// True iff the subgraph of edges with length == l0 (relative tolerance 1e-12)
// has a connected component that contains every boundary vertex and an odd
// cycle (equivalently: the component is non-bipartite; a loop counts as an
// odd cycle). This is the resonator condition that forces boundary values to
// vanish at lambda0 = (n*pi/l0)^2 for odd n.
bool check_spider_conditions(const Decoration& dec, double l0);

}  // namespace qgraph
