// Command-line front end: reads graph/decoration JSON files, runs the solvers
// and writes CSV or JSON results.
//
// Exit codes: 0 success, 1 usage error, 2 validation or precondition failure,
// 3 numerical failure (pole proximity / singular interior solve).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgraph/bands.hpp"
#include "qgraph/decoration.hpp"
#include "qgraph/dtn.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/errors.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/io.hpp"
#include "qgraph/reduction.hpp"

namespace {

using nlohmann::json;
using namespace qgraph;

// Round to the documented 12 significant digits before JSON serialization so
// every emitted number honors the output contract.
double sig12(double v) { return std::strtod(format_sig(v).c_str(), nullptr); }

struct Output {
  std::ofstream file;
  std::ostream* os = &std::cout;
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot write '" + path + "'");
    os = &file;
  }
  std::ostream& stream() { return *os; }
};

std::pair<double, double> parse_window(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("window must be given as LO:HI");
  size_t pos1 = 0, pos2 = 0;
  const std::string a = s.substr(0, colon), b = s.substr(colon + 1);
  double lo, hi;
  try {
    lo = std::stod(a, &pos1);
    hi = std::stod(b, &pos2);
  } catch (const std::exception&) {
    throw std::invalid_argument("window bounds must be numbers (LO:HI)");
  }
  if (pos1 != a.size() || pos2 != b.size())
    throw std::invalid_argument("window bounds must be numbers (LO:HI)");
  if (!(lo > 0.0) || !(hi > lo))
    throw std::invalid_argument("window requires 0 < LO < HI");
  return {lo, hi};
}

json spectrum_to_json(const SpectrumResult& spec) {
  json entries = json::array();
  for (const auto& e : spec.entries) {
    entries.push_back({{"lambda", sig12(e.lambda)},
                       {"multiplicity", e.multiplicity},
                       {"residual", sig12(e.residual)},
                       {"near_dirichlet_edge_value", e.near_dirichlet_edge_value}});
  }
  return {{"window", {sig12(spec.lambda_lo), sig12(spec.lambda_hi)}},
          {"entries", entries}};
}

void write_spectrum_csv(std::ostream& out, const SpectrumResult& spec) {
  out << "lambda,multiplicity\n";
  for (const auto& e : spec.entries)
    out << format_sig(e.lambda) << "," << e.multiplicity << "\n";
}

struct ScanFlags {
  double tol_root = ScanOptions{}.tol_root;
  double tol_rank = ScanOptions{}.tol_rank;
  double k_refine_tol = ScanOptions{}.k_refine_tol;
  double trigger = ScanOptions{}.trigger;
  double grid_step_factor = ScanOptions{}.grid_step_factor;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--tol-root", tol_root, "accept a root when the refined sigma_min is below this")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol-rank", tol_rank, "multiplicity counts singular values below tol-rank * sigma_max")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--k-tol", k_refine_tol, "golden-section refinement tolerance in k")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--trigger", trigger, "refine local minima of sigma_min below this")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grid-factor", grid_step_factor, "k grid step = pi / (factor * total length)")
        ->check(CLI::PositiveNumber);
  }
  ScanOptions resolve() const {
    ScanOptions o;
    o.tol_root = tol_root;
    o.tol_rank = tol_rank;
    o.k_refine_tol = k_refine_tol;
    o.trigger = trigger;
    o.grid_step_factor = grid_step_factor;
    return o;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"metric graph spectra, Dirichlet-to-Neumann maps and band structure"};
  app.require_subcommand(1);

  // --- validate ---
  std::string validate_path;
  auto* cmd_validate = app.add_subcommand("validate", "check a graph file and report its shape");
  cmd_validate->add_option("graph", validate_path, "graph JSON file")->required();

  // --- spectrum ---
  std::string spectrum_path, spectrum_window, spectrum_out, spectrum_format = "csv";
  ScanFlags spectrum_scan;
  auto* cmd_spectrum = app.add_subcommand("spectrum", "eigenvalues of a finite graph in a window");
  cmd_spectrum->add_option("graph", spectrum_path, "graph JSON file")->required();
  cmd_spectrum->add_option("--window", spectrum_window, "lambda window LO:HI")->required();
  cmd_spectrum->add_option("--format", spectrum_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd_spectrum->add_option("-o,--output", spectrum_out, "output path (default stdout)");
  spectrum_scan.add_to(cmd_spectrum);

  // --- dirichlet-spectrum ---
  std::string dirspec_path, dirspec_out;
  double dirspec_max = 0.0;
  ScanFlags dirspec_scan;
  auto* cmd_dirspec = app.add_subcommand(
      "dirichlet-spectrum", "spectrum of a decoration with its boundary clamped");
  cmd_dirspec->add_option("decoration", dirspec_path, "decoration JSON file")->required();
  cmd_dirspec->add_option("--max", dirspec_max, "upper lambda bound")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_dirspec->add_option("-o,--output", dirspec_out, "output path (default stdout)");
  dirspec_scan.add_to(cmd_dirspec);

  // --- dtn ---
  std::string dtn_path, dtn_out;
  double dtn_lambda = 0.0;
  double dtn_guard = DtnOptions{}.pole_guard;
  auto* cmd_dtn = app.add_subcommand("dtn", "Dirichlet-to-Neumann matrix at one lambda");
  cmd_dtn->add_option("decoration", dtn_path, "decoration JSON file")->required();
  cmd_dtn->add_option("--lambda", dtn_lambda, "query point lambda > 0")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_dtn->add_option("--pole-guard", dtn_guard, "minimum allowed distance to the clamped spectrum")
      ->check(CLI::PositiveNumber);
  cmd_dtn->add_option("-o,--output", dtn_out, "output path (default stdout)");

  // --- solvable ---
  std::string solvable_path, solvable_out;
  double solvable_lambda0 = 0.0;
  auto* cmd_solvable = app.add_subcommand(
      "solvable", "basis of boundary values with a resonant interior solution");
  cmd_solvable->add_option("decoration", solvable_path, "decoration JSON file")->required();
  cmd_solvable->add_option("--lambda0", solvable_lambda0, "resonance candidate lambda0 > 0")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_solvable->add_option("-o,--output", solvable_out, "output path (default stdout)");

  // --- pole-scan ---
  std::string polescan_path, polescan_out, polescan_decades;
  double polescan_lambda0 = 0.0;
  int polescan_per_decade = 4;
  auto* cmd_polescan = app.add_subcommand(
      "pole-scan", "sigma_min growth of the Dirichlet-to-Neumann matrix approaching lambda0");
  cmd_polescan->add_option("decoration", polescan_path, "decoration JSON file")->required();
  cmd_polescan->add_option("--lambda0", polescan_lambda0, "pole candidate lambda0 > 0")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_polescan
      ->add_option("--decades", polescan_decades,
                   "J:K probes delta from 10^-J down to 10^-K")
      ->required();
  cmd_polescan->add_option("--per-decade", polescan_per_decade, "sample points per decade")
      ->check(CLI::PositiveNumber);
  cmd_polescan->add_option("-o,--output", polescan_out, "output path (default stdout)");

  // --- decorate ---
  std::string decorate_base, decorate_dec, decorate_attach, decorate_out;
  auto* cmd_decorate = app.add_subcommand("decorate", "replace every base vertex by a decoration copy");
  cmd_decorate->add_option("graph", decorate_base, "base graph JSON file")->required();
  cmd_decorate->add_option("decoration", decorate_dec, "decoration JSON file")->required();
  cmd_decorate->add_option("--attach", decorate_attach, "attachment override JSON file");
  cmd_decorate->add_option("-o,--output", decorate_out, "output path (default stdout)");

  // --- bands ---
  std::string bands_path, bands_window, bands_out;
  int bands_grid = 17;
  ScanFlags bands_scan;
  auto* cmd_bands = app.add_subcommand("bands", "band samples of a periodic graph over the quasimomentum grid");
  cmd_bands->add_option("graph", bands_path, "periodic graph JSON file")->required();
  cmd_bands->add_option("--window", bands_window, "lambda window LO:HI")->required();
  cmd_bands->add_option("--grid", bands_grid, "quasimomentum points per dimension")
      ->check(CLI::PositiveNumber);
  cmd_bands->add_option("-o,--output", bands_out, "output path (default stdout)");
  bands_scan.add_to(cmd_bands);

  // --- certify-gap ---
  std::string gap_base, gap_dec, gap_attach, gap_out;
  double gap_l0 = 0.0, gap_flat_tol = GapCertifyOptions{}.flat_tol;
  int gap_n = 0, gap_grid = GapCertifyOptions{}.n_theta;
  ScanFlags gap_scan;
  auto* cmd_gap = app.add_subcommand(
      "certify-gap", "measure the punctured spectral neighborhood around (n*pi/l0)^2");
  cmd_gap->add_option("graph", gap_base, "periodic base graph JSON file")->required();
  cmd_gap->add_option("decoration", gap_dec, "decoration JSON file")->required();
  cmd_gap->add_option("--l0", gap_l0, "resonant edge length")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_gap->add_option("--n", gap_n, "odd mode index")->required();
  cmd_gap->add_option("--grid", gap_grid, "quasimomentum points per dimension")
      ->check(CLI::PositiveNumber);
  cmd_gap->add_option("--flat-tol", gap_flat_tol, "half-width of the flat-band classification")
      ->check(CLI::PositiveNumber);
  cmd_gap->add_option("--attach", gap_attach, "attachment override JSON file");
  cmd_gap->add_option("-o,--output", gap_out, "output path (default stdout)");
  gap_scan.add_to(cmd_gap);

  // --- reduced-check ---
  std::string red_base, red_dec, red_attach, red_window, red_out;
  double red_exclusion = 1e-4, red_match_tol = 1e-5;
  ScanFlags red_scan;
  auto* cmd_red = app.add_subcommand(
      "reduced-check", "compare the decorated spectrum with the boundary-reduced problem");
  cmd_red->add_option("graph", red_base, "finite base graph JSON file")->required();
  cmd_red->add_option("decoration", red_dec, "decoration JSON file")->required();
  cmd_red->add_option("--window", red_window, "lambda window LO:HI")->required();
  cmd_red->add_option("--exclusion", red_exclusion,
                      "radius removed around clamped-decoration and edge-resonance values")
      ->check(CLI::PositiveNumber);
  cmd_red->add_option("--match-tol", red_match_tol, "pairing tolerance between the two spectra")
      ->check(CLI::PositiveNumber);
  cmd_red->add_option("--attach", red_attach, "attachment override JSON file");
  cmd_red->add_option("-o,--output", red_out, "output path (default stdout)");
  red_scan.add_to(cmd_red);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (cmd_validate->parsed()) {
    const MetricGraph g = read_graph_file(validate_path);
    const ValidationReport rep = validate(g);
    std::cout << "vertices: " << g.vertices.size() << "\n";
    std::cout << "edges: " << g.edges.size() << "\n";
    std::cout << "period rank: " << g.period_rank << "\n";
    std::cout << "connected: " << (rep.connected ? "yes" : "no") << "\n";
    std::cout << "degree histogram:";
    for (const auto& [deg, count] : rep.degree_histogram)
      std::cout << " " << deg << "x" << count;
    std::cout << "\n";
    if (rep.regular_degree)
      std::cout << "regular of degree " << *rep.regular_degree << "\n";
    for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
    if (!rep.valid()) return 2;
    return 0;
  }

  if (cmd_spectrum->parsed()) {
    const MetricGraph g = read_graph_file(spectrum_path);
    if (!g.is_finite())
      throw std::invalid_argument("spectrum handles finite graphs; use `bands` for periodic ones");
    const auto [lo, hi] = parse_window(spectrum_window);
    const SpectrumResult spec = scan_spectrum(g, lo, hi, spectrum_scan.resolve());
    Output out(spectrum_out);
    if (spectrum_format == "json")
      out.stream() << spectrum_to_json(spec).dump(2) << "\n";
    else
      write_spectrum_csv(out.stream(), spec);
    return 0;
  }

  if (cmd_dirspec->parsed()) {
    const Decoration dec = read_decoration_file(dirspec_path);
    const SpectrumResult spec =
        dirichlet_spectrum_G(dec, dirspec_max, dirspec_scan.resolve());
    Output out(dirspec_out);
    write_spectrum_csv(out.stream(), spec);
    return 0;
  }

  if (cmd_dtn->parsed()) {
    const Decoration dec = read_decoration_file(dtn_path);
    DtnOptions opts;
    opts.pole_guard = dtn_guard;
    const DtnMatrix m = dtn_matrix(dec, dtn_lambda, opts);
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.entries.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.entries.cols(); ++j)
        row.push_back(sig12(m.entries(i, j)));
      rows.push_back(std::move(row));
    }
    const json j = {{"lambda", sig12(m.lambda)},
                    {"entries", rows},
                    {"condition_estimate", sig12(m.condition_estimate)},
                    {"boundary", dec.boundary}};
    Output out(dtn_out);
    out.stream() << j.dump(2) << "\n";
    return 0;
  }

  if (cmd_solvable->parsed()) {
    const Decoration dec = read_decoration_file(solvable_path);
    const Eigen::MatrixXd basis = solvable_at(dec, solvable_lambda0);
    json vectors = json::array();
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
      json v = json::array();
      for (Eigen::Index i = 0; i < basis.rows(); ++i) v.push_back(sig12(basis(i, j)));
      vectors.push_back(std::move(v));
    }
    const json j = {{"lambda0", sig12(solvable_lambda0)},
                    {"dimension", basis.cols()},
                    {"basis", vectors},
                    {"boundary", dec.boundary}};
    Output out(solvable_out);
    out.stream() << j.dump(2) << "\n";
    return 0;
  }

  if (cmd_polescan->parsed()) {
    const Decoration dec = read_decoration_file(polescan_path);
    const auto colon = polescan_decades.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--decades expects J:K");
    const int dj = std::stoi(polescan_decades.substr(0, colon));
    const int dk = std::stoi(polescan_decades.substr(colon + 1));
    if (dk <= dj) throw std::invalid_argument("--decades expects K > J");
    std::vector<double> deltas;
    const int steps = (dk - dj) * polescan_per_decade;
    for (int i = 0; i <= steps; ++i)
      deltas.push_back(std::pow(10.0, -(dj + static_cast<double>(i) / polescan_per_decade)));
    const PoleScalingReport rep = pole_scaling(dec, polescan_lambda0, deltas);
    Output out(polescan_out);
    out.stream() << "delta,sigma_min\n";
    for (const auto& s : rep.samples)
      out.stream() << format_sig(s.delta) << "," << format_sig(s.sigma_min) << "\n";
    out.stream() << "# fitted_slope = " << format_sig(rep.fitted_slope) << "\n";
    out.stream() << "# fitted_C = " << format_sig(rep.fitted_C) << "\n";
    for (double d : rep.skipped_deltas)
      out.stream() << "# skipped delta = " << format_sig(d) << "\n";
    return 0;
  }

  if (cmd_decorate->parsed()) {
    const MetricGraph base = read_graph_file(decorate_base);
    const Decoration dec = read_decoration_file(decorate_dec);
    std::optional<AttachmentMap> attach;
    if (!decorate_attach.empty()) attach = read_attachment_file(decorate_attach);
    const MetricGraph result =
        base.is_finite()
            ? (attach ? decorate(base, dec, &*attach) : decorate(base, dec))
            : (attach ? decorate_periodic(base, dec, &*attach)
                      : decorate_periodic(base, dec));
    Output out(decorate_out);
    write_graph(out.stream(), result);
    return 0;
  }

  if (cmd_bands->parsed()) {
    const MetricGraph g = read_graph_file(bands_path);
    const auto [lo, hi] = parse_window(bands_window);
    const BandSweep sweep = band_sweep(g, lo, hi, bands_grid, bands_scan.resolve());
    Output out(bands_out);
    const int p = g.period_rank;
    out.stream() << (p == 1 ? "theta_1,lambda" : "theta_1,theta_2,lambda") << "\n";
    for (std::size_t i = 0; i < sweep.theta_grid.size(); ++i) {
      for (const auto& e : sweep.samples[i].entries) {
        for (int m = 0; m < e.multiplicity; ++m) {
          for (double t : sweep.theta_grid[i]) out.stream() << format_sig(t) << ",";
          out.stream() << format_sig(e.lambda) << "\n";
        }
      }
    }
    out.stream() << "# grid_resolution_caveat = "
                 << format_sig(sweep.grid_resolution_caveat()) << "\n";
    return 0;
  }

  if (cmd_gap->parsed()) {
    const MetricGraph base = read_graph_file(gap_base);
    const Decoration dec = read_decoration_file(gap_dec);
    std::optional<AttachmentMap> attach;
    if (!gap_attach.empty()) attach = read_attachment_file(gap_attach);
    GapCertifyOptions opts;
    opts.n_theta = gap_grid;
    opts.flat_tol = gap_flat_tol;
    opts.scan = gap_scan.resolve();
    const GapReport rep =
        certify_gap_near(base, dec, attach ? &*attach : nullptr, gap_l0, gap_n, opts);
    const json j = {{"lambda0", sig12(rep.lambda0)},
                    {"sigma_d_distance", sig12(rep.sigma_d_distance)},
                    {"window", {sig12(rep.window_lo), sig12(rep.window_hi)}},
                    {"n_theta", rep.n_theta},
                    {"flat_band_at_lambda0", rep.flat_band_at_lambda0},
                    {"flat_band_multiplicity", rep.flat_band_multiplicity},
                    {"eps_below", sig12(rep.eps_below)},
                    {"eps_above", sig12(rep.eps_above)},
                    {"grid_resolution_caveat", sig12(rep.grid_resolution_caveat)}};
    Output out(gap_out);
    out.stream() << j.dump(2) << "\n";
    return 0;
  }

  if (cmd_red->parsed()) {
    const MetricGraph base = read_graph_file(red_base);
    const Decoration dec = read_decoration_file(red_dec);
    std::optional<AttachmentMap> attach;
    if (!red_attach.empty()) attach = read_attachment_file(red_attach);
    const auto [lo, hi] = parse_window(red_window);
    const ReducedComparisonReport rep = reduced_spectrum_check(
        base, dec, attach ? &*attach : nullptr, lo, hi, red_exclusion, red_match_tol,
        red_scan.resolve(), ReducedScanOptions{});
    json matched = json::array();
    for (const auto& m : rep.matched) {
      matched.push_back({{"direct_lambda", sig12(m.direct_lambda)},
                         {"reduced_lambda", sig12(m.reduced_lambda)},
                         {"direct_multiplicity", m.direct_multiplicity},
                         {"reduced_multiplicity", m.reduced_multiplicity},
                         {"difference", sig12(m.difference)}});
    }
    json direct_unmatched = json::array(), reduced_unmatched = json::array(),
         excluded = json::array();
    for (const auto& e : rep.direct_unmatched) direct_unmatched.push_back(sig12(e.lambda));
    for (const auto& e : rep.reduced_unmatched) reduced_unmatched.push_back(sig12(e.lambda));
    for (double v : rep.excluded_points) excluded.push_back(sig12(v));
    const json j = {{"matched", matched},
                    {"direct_unmatched", direct_unmatched},
                    {"reduced_unmatched", reduced_unmatched},
                    {"max_difference", sig12(rep.max_difference)},
                    {"excluded_points", excluded}};
    Output out(red_out);
    out.stream() << j.dump(2) << "\n";
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const PoleProximityError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const SingularSolveError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
