#include "qgraph/decoration.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace qgraph {

namespace {

void require_decoration(const Decoration& dec) {
  dec.graph.require_well_formed();
  if (!dec.graph.is_finite())
    throw std::invalid_argument("decoration graph must be finite");
  if (dec.boundary.empty())
    throw std::invalid_argument("decoration has no boundary vertices");
  std::set<std::string> seen;
  for (const auto& b : dec.boundary) {
    if (!dec.graph.vertices.count(b))
      throw std::invalid_argument("boundary vertex '" + b + "' is not in the decoration");
    if (!seen.insert(b).second)
      throw std::invalid_argument("boundary vertex '" + b + "' listed twice");
  }
}

int regular_degree_or_throw(const MetricGraph& base) {
  if (base.vertices.empty())
    throw std::invalid_argument("base graph has no vertices");
  int d = -1;
  for (const auto& [id, cond] : base.vertices) {
    const int dv = base.degree(id);
    if (d < 0) d = dv;
    if (dv != d)
      throw std::invalid_argument("base graph is not regular: vertex '" + id +
                                  "' has degree " + std::to_string(dv) +
                                  ", expected " + std::to_string(d));
  }
  return d;
}

void check_attachment(const MetricGraph& base, const Decoration& dec,
                      const AttachmentMap& attach) {
  for (const auto& [vid, cond] : base.vertices) {
    auto it = attach.find(vid);
    if (it == attach.end())
      throw std::invalid_argument("attachment map misses vertex '" + vid + "'");
    const auto& slots = it->second;
    auto ends = base.incident_ends(vid);
    if (slots.size() != ends.size() || slots.size() != dec.boundary.size())
      throw std::invalid_argument("attachment for vertex '" + vid +
                                  "' has the wrong number of slots");
    std::set<std::pair<std::string, bool>> used_ends;
    std::set<std::string> used_boundary;
    for (const auto& s : slots) {
      if (dec.boundary_index(s.boundary_vertex) < 0)
        throw std::invalid_argument("attachment for vertex '" + vid +
                                    "' targets unknown boundary vertex '" +
                                    s.boundary_vertex + "'");
      if (!used_boundary.insert(s.boundary_vertex).second)
        throw std::invalid_argument("attachment for vertex '" + vid +
                                    "' uses boundary vertex '" + s.boundary_vertex +
                                    "' twice");
      bool found = false;
      for (const auto& end : ends) {
        const auto& e = base.edges[end.edge];
        if (e.id == s.edge_id && end.at_end == s.at_end) { found = true; break; }
      }
      if (!found)
        throw std::invalid_argument("attachment for vertex '" + vid +
                                    "' names an edge end that is not incident: " +
                                    s.edge_id + (s.at_end ? "/end" : "/start"));
      if (!used_ends.insert({s.edge_id, s.at_end}).second)
        throw std::invalid_argument("attachment for vertex '" + vid +
                                    "' lists edge end " + s.edge_id + " twice");
    }
  }
}

MetricGraph decorate_impl(const MetricGraph& base, const Decoration& dec,
                          const AttachmentMap* attach) {
  base.require_well_formed();
  require_decoration(dec);
  const int d = regular_degree_or_throw(base);
  if (d != dec.boundary_size())
    throw std::invalid_argument("decoration has " + std::to_string(dec.boundary_size()) +
                                " boundary vertices but the base graph is " +
                                std::to_string(d) + "-regular");

  AttachmentMap def;
  if (!attach) {
    def = sorted_attachment(base, dec);
    attach = &def;
  }
  check_attachment(base, dec, *attach);

  MetricGraph out;
  out.period_rank = base.period_rank;

  // Fresh decoration copy per base vertex; all conditions Kirchhoff.
  for (const auto& [vid, cond] : base.vertices) {
    for (const auto& [wid, wcond] : dec.graph.vertices)
      out.vertices[vid + "/" + wid] = VertexCondition::kirchhoff;
    for (const auto& e : dec.graph.edges) {
      MetricEdge copy;
      copy.id = vid + "/" + e.id;
      copy.start = vid + "/" + e.start;
      copy.end = vid + "/" + e.end;
      copy.length = e.length;
      if (out.period_rank > 0) copy.shift.assign(out.period_rank, 0);
      out.edges.push_back(copy);
    }
  }

  // Base edges survive with their ids, lengths and shifts; endpoints move to
  // the boundary vertex assigned by the attachment.
  for (const auto& e : base.edges) {
    MetricEdge moved = e;
    auto resolve = [&](const std::string& vid, bool at_end) {
      for (const auto& s : attach->at(vid)) {
        if (s.edge_id == e.id && s.at_end == at_end)
          return vid + "/" + s.boundary_vertex;
      }
      throw std::logic_error("attachment lookup failed for edge " + e.id);
    };
    moved.start = resolve(e.start, false);
    moved.end = resolve(e.end, true);
    out.edges.push_back(moved);
  }

  std::sort(out.edges.begin(), out.edges.end(),
            [](const MetricEdge& a, const MetricEdge& b) { return a.id < b.id; });
  return out;
}

}  // namespace

int Decoration::boundary_index(const std::string& vertex) const {
  for (int i = 0; i < static_cast<int>(boundary.size()); ++i)
    if (boundary[i] == vertex) return i;
  return -1;
}

AttachmentMap sorted_attachment(const MetricGraph& base, const Decoration& dec) {
  AttachmentMap m;
  for (const auto& [vid, cond] : base.vertices) {
    auto ends = base.incident_ends(vid);
    if (ends.size() != dec.boundary.size())
      throw std::invalid_argument("vertex '" + vid + "' has degree " +
                                  std::to_string(ends.size()) + ", decoration boundary has " +
                                  std::to_string(dec.boundary.size()) + " vertices");
    std::vector<AttachmentSlot> slots;
    slots.reserve(ends.size());
    for (std::size_t i = 0; i < ends.size(); ++i) {
      const auto& e = base.edges[ends[i].edge];
      slots.push_back({e.id, ends[i].at_end, dec.boundary[i]});
    }
    m[vid] = std::move(slots);
  }
  return m;
}

MetricGraph decorate(const MetricGraph& base, const Decoration& dec,
                     const AttachmentMap* attach) {
  if (!base.is_finite())
    throw std::invalid_argument("decorate: base graph must be finite; use decorate_periodic");
  return decorate_impl(base, dec, attach);
}

MetricGraph decorate_periodic(const MetricGraph& base, const Decoration& dec,
                              const AttachmentMap* attach) {
  if (base.is_finite())
    throw std::invalid_argument("decorate_periodic: base graph must be periodic");
  return decorate_impl(base, dec, attach);
}

Decoration make_spider(int degree, double l0, int cycle_size) {
  if (degree < 3)
    throw std::invalid_argument("make_spider: degree must be at least 3");
  if (!(l0 > 0.0))
    throw std::invalid_argument("make_spider: l0 must be positive");
  if (cycle_size % 2 == 0)
    throw std::invalid_argument("make_spider: cycle_size must be odd (even cycles do not "
                                "force boundary values to vanish)");
  if (cycle_size < 3 || cycle_size > degree)
    throw std::invalid_argument("make_spider: cycle_size must lie in [3, degree]");

  Decoration dec;
  for (int i = 1; i <= degree; ++i) {
    const std::string b = "b" + std::to_string(i);
    dec.graph.vertices[b] = VertexCondition::kirchhoff;
    dec.boundary.push_back(b);
  }
  int edge_no = 0;
  auto add_edge = [&](const std::string& u, const std::string& v) {
    MetricEdge e;
    e.id = "s" + std::to_string(edge_no++);
    e.start = u;
    e.end = v;
    e.length = l0;
    dec.graph.edges.push_back(e);
  };
  for (int i = 1; i < cycle_size; ++i)
    add_edge("b" + std::to_string(i), "b" + std::to_string(i + 1));
  add_edge("b" + std::to_string(cycle_size), "b1");
  for (int j = cycle_size + 1; j <= degree; ++j)
    add_edge("b1", "b" + std::to_string(j));
  return dec;
}

bool check_spider_conditions(const Decoration& dec, double l0) {
  require_decoration(dec);
  if (!(l0 > 0.0))
    throw std::invalid_argument("check_spider_conditions: l0 must be positive");

  // Subgraph of edges with length == l0 up to relative tolerance.
  auto is_l0 = [&](double len) { return std::abs(len - l0) <= 1e-12 * l0; };

  // 2-color the l0-subgraph; a component is non-bipartite exactly when it
  // contains an odd cycle (loops count as odd cycles). The condition holds
  // when some component contains all boundary vertices and an odd cycle.
  std::map<std::string, int> color;       // -1 unvisited
  std::map<std::string, int> comp;        // component index
  for (const auto& [vid, c] : dec.graph.vertices) { color[vid] = -1; comp[vid] = -1; }

  std::map<std::string, std::vector<std::string>> adj;
  std::set<std::string> odd_by_loop_roots;
  std::vector<bool> component_odd;

  for (const auto& e : dec.graph.edges) {
    if (!is_l0(e.length)) continue;
    if (e.start == e.end) {
      odd_by_loop_roots.insert(e.start);
      continue;
    }
    adj[e.start].push_back(e.end);
    adj[e.end].push_back(e.start);
  }

  int next_comp = 0;
  for (const auto& [vid, c0] : dec.graph.vertices) {
    if (color[vid] != -1) continue;
    const int ci = next_comp++;
    bool odd = false;
    std::vector<std::string> stack{vid};
    color[vid] = 0;
    comp[vid] = ci;
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (odd_by_loop_roots.count(v)) odd = true;
      for (const auto& w : adj[v]) {
        if (color[w] == -1) {
          color[w] = 1 - color[v];
          comp[w] = ci;
          stack.push_back(w);
        } else if (color[w] == color[v]) {
          odd = true;
        }
      }
    }
    component_odd.push_back(odd);
  }

  // All boundary vertices in one component, and that component carries an
  // odd cycle.
  const int c0 = comp[dec.boundary.front()];
  for (const auto& b : dec.boundary)
    if (comp[b] != c0) return false;
  return component_odd[c0];
}

}  // namespace qgraph
