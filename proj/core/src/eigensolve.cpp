#include "qgraph/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "qgraph/parallel.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::VectorXd singular_values(const Eigen::MatrixXd& m) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues();
}

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues();
}

// Golden-section minimization of f over [a, b] down to bracket width xtol.
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double xtol) {
  constexpr double gr = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct Root {
  double k;
  double residual;
  int multiplicity;
};

// Scans sigma_min(k) over a uniform grid, refines every local dip below the
// trigger, and keeps refined points whose residual passes tol_root.
std::vector<Root> dip_scan(const std::function<Eigen::VectorXd(double)>& sv,
                           double k_lo, double k_hi, double step,
                           const ScanOptions& opts) {
  const std::size_t n_pts =
      static_cast<std::size_t>(std::floor((k_hi - k_lo) / step)) + 2;
  if (n_pts > opts.max_grid_points)
    throw std::invalid_argument(
        "scan grid would need " + std::to_string(n_pts) +
        " points (limit " + std::to_string(opts.max_grid_points) +
        "); narrow the window or relax the grid step");
  const std::size_t n = std::max<std::size_t>(n_pts, 5);
  const double h = (k_hi - k_lo) / static_cast<double>(n - 1);

  std::vector<double> grid(n), sigma(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = k_lo + h * static_cast<double>(i);
  grid.back() = k_hi;
  parallel_for(n, [&](std::size_t i) {
    const auto s = sv(grid[i]);
    sigma[i] = s(s.size() - 1);
  });

  auto sigma_min_at = [&](double k) {
    const auto s = sv(k);
    return s(s.size() - 1);
  };

  // Candidate brackets around local minima; window edges included so roots at
  // lambda_lo survive and near-edge roots can be filtered by the caller.
  std::vector<std::pair<double, double>> brackets;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = sigma[i];
    if (s >= opts.trigger) continue;
    const bool left_ok = (i == 0) ? true : sigma[i - 1] >= s;
    const bool right_ok = (i + 1 == n) ? true : sigma[i + 1] >= s;
    const bool strict = (i > 0 && sigma[i - 1] > s) || (i + 1 < n && sigma[i + 1] > s) ||
                        (i == 0) || (i + 1 == n);
    if (left_ok && right_ok && strict) {
      const double lo = (i == 0) ? std::max(k_lo - h, 0.25 * k_lo) : grid[i - 1];
      const double hi = (i + 1 == n) ? k_hi + h : grid[i + 1];
      brackets.push_back({lo, hi});
    }
  }

  std::vector<Root> roots(brackets.size(), Root{0.0, 0.0, 0});
  parallel_for(brackets.size(), [&](std::size_t i) {
    const double k_star =
        golden_min(sigma_min_at, brackets[i].first, brackets[i].second, opts.k_refine_tol);
    const auto s = sv(k_star);
    const double smin = s(s.size() - 1);
    if (smin < opts.tol_root) {
      // Rows are normalized, so away from total degeneracy sigma_max is O(1);
      // the floor keeps the nullity count meaningful when the whole matrix
      // vanishes at the root (e.g. a loop at a full period).
      const double smax = std::max(s(0), 1.0);
      int mult = 0;
      for (Eigen::Index j = 0; j < s.size(); ++j)
        if (s(j) < opts.tol_rank * smax) ++mult;
      roots[i] = Root{k_star, smin, std::max(mult, 1)};
    }
  });

  std::vector<Root> accepted;
  for (const auto& r : roots)
    if (r.multiplicity > 0) accepted.push_back(r);
  std::sort(accepted.begin(), accepted.end(),
            [](const Root& a, const Root& b) { return a.k < b.k; });

  // Adjacent dips can refine to the same root; keep the best residual.
  std::vector<Root> merged;
  const double merge_tol = 100.0 * opts.k_refine_tol;
  for (const auto& r : accepted) {
    if (!merged.empty() && r.k - merged.back().k < merge_tol) {
      if (r.residual < merged.back().residual) merged.back() = r;
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

SpectrumResult scan_with(const std::function<Eigen::VectorXd(double)>& sv,
                         const MetricGraph& g, double lambda_lo, double lambda_hi,
                         const ScanOptions& opts) {
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    throw std::invalid_argument("scan window must satisfy 0 < lambda_lo < lambda_hi");
  const double L = g.total_length();
  if (!(L > 0.0)) throw std::invalid_argument("graph has no edges to scan");

  const double k_lo = std::sqrt(lambda_lo);
  const double k_hi = std::sqrt(lambda_hi);
  const double step = kPi / (opts.grid_step_factor * L);

  auto roots = dip_scan(sv, k_lo, k_hi, step, opts);

  SpectrumResult res;
  res.lambda_lo = lambda_lo;
  res.lambda_hi = lambda_hi;
  res.options = opts;

  const auto sigma_d = dirichlet_edge_spectrum(g, lambda_hi + 1.0);
  auto near_sigma_d = [&](double lambda) {
    for (const auto& [v, mult] : sigma_d)
      if (std::abs(lambda - v) <= 1e-9 * std::max(1.0, v)) return true;
    return false;
  };

  // Slack at both edges keeps the half-open convention stable under
  // refinement jitter: a root sitting exactly at lambda_lo stays in, one
  // exactly at lambda_hi stays out, so adjacent windows stitch without
  // duplicating or dropping boundary roots.
  const double edge_slack = 1e-9 * std::max(1.0, lambda_lo);
  const double top_slack = 1e-9 * std::max(1.0, lambda_hi);
  for (const auto& r : roots) {
    const double lambda = r.k * r.k;
    if (lambda < lambda_lo - edge_slack || lambda >= lambda_hi - top_slack) continue;
    res.entries.push_back({lambda, r.multiplicity, r.residual, near_sigma_d(lambda)});
  }
  return res;
}

}  // namespace

int SpectrumResult::total_multiplicity() const {
  int m = 0;
  for (const auto& e : entries) m += e.multiplicity;
  return m;
}

SpectrumResult scan_spectrum(const MetricGraph& g, double lambda_lo,
                             double lambda_hi, const ScanOptions& opts) {
  g.require_well_formed();
  if (!g.is_finite())
    throw std::invalid_argument("scan_spectrum requires a finite graph; use bloch_spectrum");
  auto sv = [&g](double k) { return singular_values(detail::assemble_real(g, k)); };
  return scan_with(sv, g, lambda_lo, lambda_hi, opts);
}

SpectrumResult bloch_spectrum(const MetricGraph& g,
                              const std::vector<double>& theta,
                              double lambda_lo, double lambda_hi,
                              const ScanOptions& opts) {
  g.require_well_formed();
  if (g.is_finite())
    throw std::invalid_argument("bloch_spectrum requires a periodic graph");
  if (static_cast<int>(theta.size()) != g.period_rank)
    throw std::invalid_argument("theta dimension must equal the period rank");
  auto sv = [&g, &theta](double k) {
    return singular_values(detail::assemble_complex(g, k, theta));
  };
  return scan_with(sv, g, lambda_lo, lambda_hi, opts);
}

int zero_eigenvalue_multiplicity(const MetricGraph& g) {
  g.require_well_formed();
  if (!g.is_finite())
    throw std::invalid_argument("zero_eigenvalue_multiplicity requires a finite graph");
  auto comp = g.components();
  int n_comp = 0;
  for (const auto& [vid, c] : comp) n_comp = std::max(n_comp, c + 1);
  std::vector<bool> has_dirichlet(n_comp, false);
  for (const auto& [vid, cond] : g.vertices)
    if (cond == VertexCondition::dirichlet) has_dirichlet[comp[vid]] = true;
  int m = 0;
  for (bool d : has_dirichlet)
    if (!d) ++m;
  return m;
}

WeylReport weyl_check(const SpectrumResult& result, const MetricGraph& g) {
  g.require_well_formed();
  const double L = g.total_length();
  WeylReport rep;
  rep.flag_threshold =
      static_cast<double>(g.vertices.size() + g.edges.size());

  // N(lambda) counts window roots only; the comparison curve L sqrt(lambda)/pi
  // is global, so windows starting high inflate the deviation (flagged then).
  auto weyl = [&](double lambda) { return L * std::sqrt(lambda) / kPi; };
  double dev = std::abs(0.0 - weyl(result.lambda_lo));
  int count = 0;
  for (const auto& e : result.entries) {
    dev = std::max(dev, std::abs(count - weyl(e.lambda)));
    count += e.multiplicity;
    dev = std::max(dev, std::abs(count - weyl(e.lambda)));
  }
  dev = std::max(dev, std::abs(count - weyl(result.lambda_hi)));
  rep.max_deviation = dev;
  rep.suspicious = dev > rep.flag_threshold;
  return rep;
}

}  // namespace qgraph
