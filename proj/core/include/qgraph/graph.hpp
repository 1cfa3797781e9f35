#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qgraph {

enum class VertexCondition { kirchhoff, dirichlet };

// One metric edge. `shift` is the lattice translation of the end vertex
// relative to the start vertex; it is empty (or all zero) on finite graphs
// and has period_rank entries on periodic ones. The start vertex always sits
// in the fundamental domain.
struct MetricEdge {
  std::string id;
  std::string start;
  std::string end;
  double length = 0.0;
  std::vector<int> shift;

  bool has_shift() const;
};

// A specific endpoint of an edge: (edge index into MetricGraph::edges,
// which side). Loops contribute two distinct ends at the same vertex.
struct EdgeEnd {
  int edge = -1;
  bool at_end = false;

  friend bool operator==(const EdgeEnd&, const EdgeEnd&) = default;
};

// Metric graph with per-vertex matching conditions. A periodic graph is the
// same structure with period_rank >= 1 and shift vectors on its edges; the
// vertex set then describes one fundamental domain.
struct MetricGraph {
  std::map<std::string, VertexCondition> vertices;
  std::vector<MetricEdge> edges;
  int period_rank = 0;
  std::optional<double> uniformity;  // when set, lengths must lie in [u, 1/u]

  bool is_finite() const { return period_rank == 0; }

  // Edge ends at `vertex`, ordered by (edge id, start-before-end). The order
  // is the one used for secular rows and for the default attachment policy.
  std::vector<EdgeEnd> incident_ends(const std::string& vertex) const;

  // Degree = number of incident edge ends (loops count twice).
  int degree(const std::string& vertex) const;

  double total_length() const;
  bool has_dirichlet_vertex() const;

  // Connected components over the quotient graph (shifts ignored).
  // Returns a map vertex -> component index, components numbered from 0.
  std::map<std::string, int> components() const;

  // Throws std::invalid_argument when the graph is structurally unusable
  // (dangling endpoint references, nonpositive lengths, bad shift ranks).
  // Operations that need a well-formed graph call this first.
  void require_well_formed() const;
};

// Report-only structural check; never throws.
struct ValidationReport {
  std::map<int, int> degree_histogram;
  bool connected = false;
  bool lengths_positive = false;
  bool lengths_within_uniformity = true;
  std::optional<int> regular_degree;  // set when all degrees agree
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
};

ValidationReport validate(const MetricGraph& g);

// Dirichlet spectrum of the disjoint edges: all values (n*pi/l_e)^2 up to
// lambda_max, merged at relative tolerance 1e-12, with multiplicities.
std::vector<std::pair<double, int>> dirichlet_edge_spectrum(const MetricGraph& g,
                                                            double lambda_max);

// Exact distance from lambda0 to the full Dirichlet edge resonance set
// {(n*pi/l_e)^2 : n >= 1, e edge of g}.
double dirichlet_edge_distance(const MetricGraph& g, double lambda0);

}  // namespace qgraph
