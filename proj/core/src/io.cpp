#include "qgraph/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qgraph {

namespace {

using nlohmann::json;

json parse(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("malformed JSON: ") + e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path.string() + "'");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write '" + path.string() + "'");
  return out;
}

VertexCondition parse_condition(const std::string& s) {
  if (s == "kirchhoff") return VertexCondition::kirchhoff;
  if (s == "dirichlet") return VertexCondition::dirichlet;
  throw std::invalid_argument("unknown vertex condition '" + s +
                              "' (expected kirchhoff or dirichlet)");
}

MetricGraph graph_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("graph file must hold a JSON object");
  MetricGraph g;
  g.period_rank = j.value("period_rank", 0);
  if (g.period_rank < 0)
    throw std::invalid_argument("period_rank must be nonnegative");
  if (j.contains("uniformity")) g.uniformity = j.at("uniformity").get<double>();

  if (!j.contains("vertices") || !j.at("vertices").is_array())
    throw std::invalid_argument("graph file needs a \"vertices\" array");
  for (const auto& v : j.at("vertices")) {
    const auto id = v.at("id").get<std::string>();
    if (g.vertices.count(id))
      throw std::invalid_argument("duplicate vertex id '" + id + "'");
    g.vertices[id] = parse_condition(v.value("condition", "kirchhoff"));
  }

  if (!j.contains("edges") || !j.at("edges").is_array())
    throw std::invalid_argument("graph file needs an \"edges\" array");
  for (const auto& e : j.at("edges")) {
    MetricEdge edge;
    edge.id = e.at("id").get<std::string>();
    edge.start = e.at("start").get<std::string>();
    edge.end = e.at("end").get<std::string>();
    edge.length = e.at("length").get<double>();
    if (e.contains("shift")) edge.shift = e.at("shift").get<std::vector<int>>();
    if (edge.shift.empty() && g.period_rank > 0)
      edge.shift.assign(g.period_rank, 0);
    g.edges.push_back(std::move(edge));
  }
  return g;
}

json graph_to_json(const MetricGraph& g) {
  json j;
  j["vertices"] = json::array();
  for (const auto& [id, cond] : g.vertices)
    j["vertices"].push_back(
        {{"id", id},
         {"condition", cond == VertexCondition::kirchhoff ? "kirchhoff" : "dirichlet"}});
  j["edges"] = json::array();
  for (const auto& e : g.edges) {
    json je = {{"id", e.id}, {"start", e.start}, {"end", e.end}, {"length", e.length}};
    if (g.period_rank > 0) je["shift"] = e.shift;
    j["edges"].push_back(std::move(je));
  }
  j["period_rank"] = g.period_rank;
  if (g.uniformity) j["uniformity"] = *g.uniformity;
  return j;
}

}  // namespace

MetricGraph read_graph(std::istream& in) {
  const json j = parse(in);
  try {
    return graph_from_json(j);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("graph file: ") + e.what());
  }
}

MetricGraph read_graph_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const MetricGraph& g) {
  out << graph_to_json(g).dump(2) << "\n";
}

void write_graph_file(const std::filesystem::path& path, const MetricGraph& g) {
  auto out = open_out(path);
  write_graph(out, g);
}

Decoration read_decoration(std::istream& in) {
  const json j = parse(in);
  try {
    Decoration dec;
    dec.graph = graph_from_json(j);
    if (!j.contains("boundary") || !j.at("boundary").is_array())
      throw std::invalid_argument("decoration file needs a \"boundary\" array");
    for (const auto& b : j.at("boundary")) dec.boundary.push_back(b.get<std::string>());
    return dec;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("decoration file: ") + e.what());
  }
}

Decoration read_decoration_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_decoration(in);
}

void write_decoration(std::ostream& out, const Decoration& dec) {
  json j = graph_to_json(dec.graph);
  j["boundary"] = dec.boundary;
  out << j.dump(2) << "\n";
}

void write_decoration_file(const std::filesystem::path& path, const Decoration& dec) {
  auto out = open_out(path);
  write_decoration(out, dec);
}

AttachmentMap read_attachment(std::istream& in) {
  const json j = parse(in);
  if (!j.is_object())
    throw std::invalid_argument("attachment file must map vertex ids to slot lists");
  AttachmentMap attach;
  try {
    for (const auto& [vid, slots] : j.items()) {
      if (!slots.is_array())
        throw std::invalid_argument("attachment entry for '" + vid + "' must be a list");
      for (const auto& s : slots) {
        AttachmentSlot slot;
        slot.edge_id = s.at("edge").get<std::string>();
        const auto end = s.at("end").get<std::string>();
        if (end == "start") {
          slot.at_end = false;
        } else if (end == "end") {
          slot.at_end = true;
        } else {
          throw std::invalid_argument("attachment slot \"end\" must be \"start\" or \"end\"");
        }
        slot.boundary_vertex = s.at("boundary_vertex").get<std::string>();
        attach[vid].push_back(std::move(slot));
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("attachment file: ") + e.what());
  }
  return attach;
}

AttachmentMap read_attachment_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_attachment(in);
}

std::string format_full(double v) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace qgraph
