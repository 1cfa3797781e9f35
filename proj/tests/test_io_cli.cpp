#include <stdexcept>
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qgraph/decoration.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/io.hpp"
#include "test_helpers.hpp"

using namespace qgraph;
using fixtures::kPi;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "qgraph_cli_scratch";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path p = scratch_dir() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture = scratch_dir() / ("capture" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string("\"") + QGRAPH_CLI_PATH + "\" " + args +
                          " > \"" + capture.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

// Parses "a,b" CSV data rows, skipping the header and "#" comments.
std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) row.push_back(std::strtod(field.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

double comment_value(const std::string& text, const std::string& key) {
  const auto pos = text.find(key);
  REQUIRE(pos != std::string::npos);
  return std::strtod(text.c_str() + pos + key.size(), nullptr);
}

fs::path graph_file(const std::string& name, const MetricGraph& g) {
  const fs::path p = scratch_dir() / name;
  write_graph_file(p, g);
  return p;
}

fs::path decoration_file(const std::string& name, const Decoration& d) {
  const fs::path p = scratch_dir() / name;
  write_decoration_file(p, d);
  return p;
}

}  // namespace

TEST_CASE("format_full reproduces every double exactly") {
  const double values[] = {kPi,   2.0 / 3.0, 0.1,    1.0,        -kPi,
                           1e300, 5e-324,    1e-17,  123456789.123456789,
                           0.5,   9.0 * kPi * kPi / 4.0};
  for (double v : values) {
    const std::string s = format_full(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_full(0.5) == "0.5");
  CHECK(format_full(1.0) == "1");
}

TEST_CASE("format_sig prints twelve significant digits") {
  CHECK(format_sig(kPi) == "3.14159265359");
  CHECK(format_sig(kPi * kPi) == "9.86960440109");
  CHECK(format_sig(4 * kPi * kPi) == "39.4784176044");
  CHECK(format_sig(1.0) == "1");
}

TEST_CASE("graph files round-trip exactly") {
  MetricGraph g = fixtures::k5(2.0 / 3.0);
  g.uniformity = 2.0 / 3.0;
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream in(out.str());
  const MetricGraph back = read_graph(in);

  CHECK(back.period_rank == g.period_rank);
  REQUIRE(back.uniformity.has_value());
  CHECK(*back.uniformity == *g.uniformity);
  REQUIRE(back.vertices.size() == g.vertices.size());
  for (const auto& [id, cond] : g.vertices) {
    REQUIRE(back.vertices.count(id) == 1);
    CHECK(back.vertices.at(id) == cond);
  }
  REQUIRE(back.edges.size() == g.edges.size());
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    CHECK(back.edges[i].id == g.edges[i].id);
    CHECK(back.edges[i].start == g.edges[i].start);
    CHECK(back.edges[i].end == g.edges[i].end);
    CHECK(back.edges[i].length == g.edges[i].length);
  }
}

TEST_CASE("periodic graph files keep their shifts") {
  const MetricGraph g = fixtures::square_lattice();
  std::ostringstream out;
  write_graph(out, g);
  std::istringstream in(out.str());
  const MetricGraph back = read_graph(in);
  REQUIRE(back.edges.size() == 2);
  CHECK(back.period_rank == 2);
  CHECK(back.edges[0].shift == std::vector<int>({1, 0}));
  CHECK(back.edges[1].shift == std::vector<int>({0, 1}));
}

TEST_CASE("omitted shifts on a periodic graph default to zero") {
  std::istringstream in(R"({
    "period_rank": 1,
    "vertices": [{"id": "v"}],
    "edges": [{"id": "e1", "start": "v", "end": "v", "length": 1.0}]
  })");
  const MetricGraph g = read_graph(in);
  CHECK(g.edges[0].shift == std::vector<int>({0}));
  CHECK(g.vertices.at("v") == VertexCondition::kirchhoff);
}

TEST_CASE("decoration files round-trip with their boundary order") {
  const Decoration dec = make_spider(4, 1.0, 3);
  std::ostringstream out;
  write_decoration(out, dec);
  std::istringstream in(out.str());
  const Decoration back = read_decoration(in);
  CHECK(back.boundary == dec.boundary);
  CHECK(back.graph.edges.size() == dec.graph.edges.size());
}

TEST_CASE("attachment files parse to slot lists") {
  std::istringstream in(R"({
    "v1": [{"edge": "e1", "end": "start", "boundary_vertex": "b1"},
           {"edge": "e3", "end": "end", "boundary_vertex": "b2"}]
  })");
  const AttachmentMap attach = read_attachment(in);
  REQUIRE(attach.count("v1") == 1);
  REQUIRE(attach.at("v1").size() == 2);
  CHECK(attach.at("v1")[0].edge_id == "e1");
  CHECK_FALSE(attach.at("v1")[0].at_end);
  CHECK(attach.at("v1")[1].at_end);
  CHECK(attach.at("v1")[1].boundary_vertex == "b2");
}

TEST_CASE("malformed input files are rejected with invalid_argument") {
  auto reject_graph = [](const std::string& text) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_graph(in), std::invalid_argument);
  };
  reject_graph("this is not json {");
  reject_graph(R"({"edges": []})");
  reject_graph(R"({"vertices": [{"id": "a"}, {"id": "a"}], "edges": []})");
  reject_graph(R"({"vertices": [{"id": "a", "condition": "robin"}], "edges": []})");
  reject_graph(R"({"vertices": [{"id": "a"}],
                   "edges": [{"id": "e", "start": "a", "end": "a"}]})");

  std::istringstream dec_in(R"({"vertices": [{"id": "b"}], "edges": []})");
  CHECK_THROWS_AS(read_decoration(dec_in), std::invalid_argument);

  std::istringstream att_in(R"({"v": [{"edge": "e1", "end": "middle",
                                       "boundary_vertex": "b1"}]})");
  CHECK_THROWS_AS(read_attachment(att_in), std::invalid_argument);
}

TEST_CASE("cli: validate") {
  const auto good = graph_file("loop.json", fixtures::loop());
  auto r = run_cli("validate \"" + good.string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("connected: yes") != std::string::npos);

  const auto bad = write_temp("dangling.json", R"({
    "vertices": [{"id": "a"}],
    "edges": [{"id": "e", "start": "a", "end": "zz", "length": 1.0}]
  })");
  r = run_cli("validate \"" + bad.string() + "\"");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("violation") != std::string::npos);

  r = run_cli("validate \"" + (scratch_dir() / "missing.json").string() + "\"");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli: usage errors exit with 1") {
  const auto g = graph_file("interval.json", fixtures::dirichlet_interval());
  CHECK(run_cli("spectrum \"" + g.string() + "\" --window 0.5:50 --bogus 1").exit_code == 1);
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("").exit_code == 1);
}

TEST_CASE("cli: spectrum output in both formats") {
  const auto g = graph_file("interval.json", fixtures::dirichlet_interval());
  auto r = run_cli("spectrum \"" + g.string() + "\" --window 0.5:50");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("lambda,multiplicity\n", 0) == 0);
  const auto rows = csv_rows(r.output);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == doctest::Approx(kPi * kPi).epsilon(1e-8));
  CHECK(rows[0][1] == 1.0);
  CHECK(rows[1][0] == doctest::Approx(4 * kPi * kPi).epsilon(1e-8));

  r = run_cli("spectrum \"" + g.string() + "\" --window 0.5:50 --format json");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  REQUIRE(j.at("entries").size() == 2);
  CHECK(j.at("entries")[0].at("lambda").get<double>() ==
        doctest::Approx(kPi * kPi).epsilon(1e-8));
  CHECK(j.at("entries")[0].at("multiplicity").get<int>() == 1);
  CHECK(j.at("window")[0].get<double>() == doctest::Approx(0.5));

  const fs::path out_path = scratch_dir() / "spectrum_out.csv";
  r = run_cli("spectrum \"" + g.string() + "\" --window 0.5:50 -o \"" +
              out_path.string() + "\"");
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out_path);
  std::ostringstream file_content;
  file_content << in.rdbuf();
  CHECK(csv_rows(file_content.str()).size() == 2);

  CHECK(run_cli("spectrum \"" + g.string() + "\" --window 50:0.5").exit_code == 2);
  CHECK(run_cli("spectrum \"" + g.string() + "\" --window nonsense").exit_code == 2);
}

TEST_CASE("cli: dirichlet-spectrum of a decoration") {
  const auto d = decoration_file("edge_dec.json", fixtures::edge_decoration(1.0));
  const auto r = run_cli("dirichlet-spectrum \"" + d.string() + "\" --max 50");
  REQUIRE(r.exit_code == 0);
  const auto rows = csv_rows(r.output);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == doctest::Approx(kPi * kPi).epsilon(1e-8));
  CHECK(rows[1][0] == doctest::Approx(4 * kPi * kPi).epsilon(1e-8));
}

TEST_CASE("cli: dtn matrix and pole refusal") {
  const auto d = decoration_file("edge_dec.json", fixtures::edge_decoration(1.0));
  const double quarter = kPi * kPi / 4.0;
  auto r = run_cli("dtn \"" + d.string() + "\" --lambda " + format_full(quarter));
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j.at("entries")[0][1].get<double>() == doctest::Approx(kPi / 2).epsilon(1e-9));
  CHECK(j.at("entries")[0][0].get<double>() == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(j.at("boundary") == nlohmann::json({"b1", "b2"}));
  CHECK(j.at("condition_estimate").get<double>() > 0.0);

  r = run_cli("dtn \"" + d.string() + "\" --lambda " + format_full(kPi * kPi));
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("numerical failure") != std::string::npos);
}

TEST_CASE("cli: solvable basis dimensions") {
  const auto spider = decoration_file("spider.json", make_spider(4, 1.0, 3));
  auto r = run_cli("solvable \"" + spider.string() + "\" --lambda0 " +
                   format_full(kPi * kPi));
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.output).at("dimension").get<int>() == 0);

  const auto edge = decoration_file("edge_dec.json", fixtures::edge_decoration(1.0));
  r = run_cli("solvable \"" + edge.string() + "\" --lambda0 " + format_full(kPi * kPi));
  REQUIRE(r.exit_code == 0);
  CHECK(nlohmann::json::parse(r.output).at("dimension").get<int>() == 1);
}

TEST_CASE("cli: pole-scan reports samples and the fitted slope") {
  const auto d = decoration_file("chain_spider1.json", fixtures::chain_spider(1.0));
  const auto r = run_cli("pole-scan \"" + d.string() + "\" --lambda0 " +
                         format_full(kPi * kPi) + " --decades 2:4 --per-decade 2");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("delta,sigma_min\n", 0) == 0);
  const auto rows = csv_rows(r.output);
  CHECK(rows.size() >= 4);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][0] < rows[i - 1][0]);
  const double slope = comment_value(r.output, "# fitted_slope = ");
  CHECK(slope > -1.3);
  CHECK(slope < -0.7);
  CHECK(comment_value(r.output, "# fitted_C = ") > 0.0);
}

TEST_CASE("cli: decorate round-trips through validate and spectrum") {
  const auto base = graph_file("c3.json", fixtures::cycle(3, 1.0));
  const auto dec = decoration_file("edge_half.json", fixtures::edge_decoration(0.5));
  const fs::path decorated = scratch_dir() / "decorated.json";
  auto r = run_cli("decorate \"" + base.string() + "\" \"" + dec.string() + "\" -o \"" +
                   decorated.string() + "\"");
  REQUIRE(r.exit_code == 0);
  CHECK(run_cli("validate \"" + decorated.string() + "\"").exit_code == 0);

  // the CLI spectrum of the decorated file must equal the in-process result
  // character for character under the same defaults
  r = run_cli("spectrum \"" + decorated.string() + "\" --window 0.5:9.5");
  REQUIRE(r.exit_code == 0);
  const MetricGraph g = read_graph_file(decorated);
  const SpectrumResult spec = scan_spectrum(g, 0.5, 9.5);
  std::ostringstream expect;
  expect << "lambda,multiplicity\n";
  for (const auto& e : spec.entries)
    expect << format_sig(e.lambda) << "," << e.multiplicity << "\n";
  CHECK(r.output == expect.str());
}

TEST_CASE("cli: bands csv over the chain lattice") {
  const auto g = graph_file("chain.json", fixtures::chain_lattice());
  const auto r =
      run_cli("bands \"" + g.string() + "\" --window 2:3 --grid 9 --grid-factor 16");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.rfind("theta_1,lambda\n", 0) == 0);
  const auto rows = csv_rows(r.output);
  bool traced = false;
  for (const auto& row : rows) {
    REQUIRE(row.size() == 2);
    if (std::abs(row[0] - kPi / 2) < 1e-9 &&
        std::abs(row[1] - kPi * kPi / 4) < 1e-7)
      traced = true;
  }
  CHECK(traced);
  CHECK(r.output.find("# grid_resolution_caveat = ") != std::string::npos);
}

TEST_CASE("cli: certify-gap emits the full report") {
  const auto g = graph_file("chain.json", fixtures::chain_lattice());
  const auto d = decoration_file("chain_spider23.json", fixtures::chain_spider(2.0 / 3.0));
  const auto r = run_cli("certify-gap \"" + g.string() + "\" \"" + d.string() +
                         "\" --l0 " + format_full(2.0 / 3.0) +
                         " --n 1 --grid 5 --grid-factor 16");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j.at("lambda0").get<double>() ==
        doctest::Approx(9 * kPi * kPi / 4).epsilon(1e-9));
  CHECK(j.at("n_theta").get<int>() == 5);
  CHECK(j.at("eps_below").get<double>() > 0.0);
  CHECK(j.at("eps_above").get<double>() > 0.0);
  CHECK_FALSE(j.at("flat_band_at_lambda0").get<bool>());

  // even n violates the certification contract
  CHECK(run_cli("certify-gap \"" + g.string() + "\" \"" + d.string() + "\" --l0 " +
                format_full(2.0 / 3.0) + " --n 2 --grid 5")
            .exit_code == 2);
}

TEST_CASE("cli: reduced-check compares the two pipelines") {
  const auto base = graph_file("c3.json", fixtures::cycle(3, 1.0));
  const auto dec = decoration_file("edge_half.json", fixtures::edge_decoration(0.5));
  const auto r = run_cli("reduced-check \"" + base.string() + "\" \"" + dec.string() +
                         "\" --window 0.5:9.5");
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.output);
  CHECK(j.at("direct_unmatched").empty());
  CHECK(j.at("reduced_unmatched").empty());
  CHECK(j.at("matched").size() == 2);
  CHECK(j.at("max_difference").get<double>() <= 1e-6);
}
