#include "qgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qgraph {

bool MetricEdge::has_shift() const {
  return std::any_of(shift.begin(), shift.end(), [](int s) { return s != 0; });
}

std::vector<EdgeEnd> MetricGraph::incident_ends(const std::string& vertex) const {
  // Edges are scanned in id order so the result is stable under reordering
  // of the edge list.
  std::vector<std::pair<std::string, EdgeEnd>> found;
  for (int i = 0; i < static_cast<int>(edges.size()); ++i) {
    if (edges[i].start == vertex) found.push_back({edges[i].id, {i, false}});
    if (edges[i].end == vertex) found.push_back({edges[i].id, {i, true}});
  }
  std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second.at_end < b.second.at_end;
  });
  std::vector<EdgeEnd> out;
  out.reserve(found.size());
  for (auto& f : found) out.push_back(f.second);
  return out;
}

int MetricGraph::degree(const std::string& vertex) const {
  int d = 0;
  for (const auto& e : edges) {
    if (e.start == vertex) ++d;
    if (e.end == vertex) ++d;
  }
  return d;
}

double MetricGraph::total_length() const {
  double L = 0.0;
  for (const auto& e : edges) L += e.length;
  return L;
}

bool MetricGraph::has_dirichlet_vertex() const {
  for (const auto& [id, cond] : vertices) {
    if (cond == VertexCondition::dirichlet) return true;
  }
  return false;
}

std::map<std::string, int> MetricGraph::components() const {
  std::map<std::string, int> comp;
  for (const auto& [id, cond] : vertices) comp[id] = -1;
  // Union-find over vertex ids.
  std::map<std::string, std::string> parent;
  for (const auto& [id, cond] : vertices) parent[id] = id;
  auto find = [&](std::string v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (const auto& e : edges) {
    if (!parent.count(e.start) || !parent.count(e.end)) continue;
    auto a = find(e.start), b = find(e.end);
    if (a != b) parent[a] = b;
  }
  int next = 0;
  std::map<std::string, int> root_index;
  for (auto& [id, c] : comp) {
    auto r = find(id);
    auto it = root_index.find(r);
    if (it == root_index.end()) it = root_index.emplace(r, next++).first;
    c = it->second;
  }
  return comp;
}

void MetricGraph::require_well_formed() const {
  std::ostringstream bad;
  for (const auto& e : edges) {
    if (!vertices.count(e.start) || !vertices.count(e.end))
      bad << "edge " << e.id << " references a missing vertex; ";
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      bad << "edge " << e.id << " has nonpositive length; ";
    const int rank = static_cast<int>(e.shift.size());
    if (rank != 0 && rank != period_rank)
      bad << "edge " << e.id << " shift rank mismatch; ";
    if (period_rank == 0 && e.has_shift())
      bad << "edge " << e.id << " has a shift on a finite graph; ";
  }
  if (period_rank < 0) bad << "negative period rank; ";
  auto msg = bad.str();
  if (!msg.empty()) throw std::invalid_argument("malformed graph: " + msg);
}

ValidationReport validate(const MetricGraph& g) {
  ValidationReport r;
  r.lengths_positive = true;
  for (const auto& e : g.edges) {
    if (!g.vertices.count(e.start))
      r.violations.push_back("edge " + e.id + ": start vertex '" + e.start + "' does not exist");
    if (!g.vertices.count(e.end))
      r.violations.push_back("edge " + e.id + ": end vertex '" + e.end + "' does not exist");
    if (!(e.length > 0.0) || !std::isfinite(e.length)) {
      r.violations.push_back("edge " + e.id + ": length must be positive");
      r.lengths_positive = false;
    }
    const int rank = static_cast<int>(e.shift.size());
    if (g.period_rank == 0) {
      if (e.has_shift())
        r.violations.push_back("edge " + e.id + ": nonzero shift on a finite graph");
    } else if (rank != 0 && rank != g.period_rank) {
      r.violations.push_back("edge " + e.id + ": shift has " + std::to_string(rank) +
                             " entries, period rank is " + std::to_string(g.period_rank));
    }
    if (g.uniformity) {
      const double u = *g.uniformity;
      if (u > 0.0 && (e.length < u || e.length > 1.0 / u)) {
        r.violations.push_back("edge " + e.id + ": length outside the uniformity window [" +
                               std::to_string(u) + ", " + std::to_string(1.0 / u) + "]");
        r.lengths_within_uniformity = false;
      }
    }
  }
  if (g.uniformity && !(*g.uniformity > 0.0 && *g.uniformity <= 1.0))
    r.violations.push_back("uniformity parameter must lie in (0, 1]");
  if (g.period_rank < 0)
    r.violations.push_back("period rank must be nonnegative");

  for (const auto& [id, cond] : g.vertices) {
    const int d = g.degree(id);
    r.degree_histogram[d]++;
  }
  if (r.degree_histogram.size() == 1)
    r.regular_degree = r.degree_histogram.begin()->first;

  auto comp = g.components();
  int n_comp = 0;
  for (auto& [id, c] : comp) n_comp = std::max(n_comp, c + 1);
  r.connected = (n_comp <= 1);
  if (!r.connected)
    r.violations.push_back("graph has " + std::to_string(n_comp) + " connected components");
  return r;
}

std::vector<std::pair<double, int>> dirichlet_edge_spectrum(const MetricGraph& g,
                                                            double lambda_max) {
  if (!(lambda_max > 0.0))
    throw std::invalid_argument("dirichlet_edge_spectrum: lambda_max must be positive");
  g.require_well_formed();
  std::vector<double> vals;
  constexpr double pi = 3.14159265358979323846;
  for (const auto& e : g.edges) {
    for (int n = 1;; ++n) {
      const double v = (n * pi / e.length) * (n * pi / e.length);
      if (v > lambda_max) break;
      vals.push_back(v);
    }
  }
  std::sort(vals.begin(), vals.end());
  std::vector<std::pair<double, int>> out;
  for (double v : vals) {
    if (!out.empty() && v - out.back().first <= 1e-12 * v) {
      out.back().second++;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

double dirichlet_edge_distance(const MetricGraph& g, double lambda0) {
  if (!(lambda0 > 0.0))
    throw std::invalid_argument("dirichlet_edge_distance: lambda0 must be positive");
  g.require_well_formed();
  constexpr double pi = 3.14159265358979323846;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : g.edges) {
    // Closest n >= 1 to the real minimizer l * sqrt(lambda0) / pi.
    const double n_star = e.length * std::sqrt(lambda0) / pi;
    for (double n : {std::floor(n_star), std::ceil(n_star)}) {
      if (n < 1.0) n = 1.0;
      const double v = (n * pi / e.length) * (n * pi / e.length);
      best = std::min(best, std::abs(v - lambda0));
    }
  }
  return best;
}

}  // namespace qgraph
