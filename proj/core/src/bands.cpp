#include "qgraph/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qgraph/errors.hpp"
#include "qgraph/parallel.hpp"

namespace qgraph {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::vector<double> flattened(const SpectrumResult& s) {
  std::vector<double> out;
  for (const auto& e : s.entries)
    for (int m = 0; m < e.multiplicity; ++m) out.push_back(e.lambda);
  return out;
}

// One-sided Hausdorff distance from set a to set b; empty-vs-nonempty counts
// as the window width (the sets disagree everywhere).
double hausdorff(const std::vector<double>& a, const std::vector<double>& b,
                 double window_width) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return window_width;
  double worst = 0.0;
  for (double x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (double y : b) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

double BandSweep::grid_resolution_caveat() const {
  if (samples.empty()) return 0.0;
  const double width = lambda_hi - lambda_lo;
  const int n = n_theta;
  const int p = static_cast<int>(theta_grid.front().size());
  auto set_at = [&](int i, int j) {
    const int idx = p == 1 ? i : i * n + j;
    return flattened(samples[idx]);
  };
  double worst = 0.0;
  auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
    worst = std::max(worst, std::max(hausdorff(a, b, width), hausdorff(b, a, width)));
  };
  if (p == 1) {
    for (int i = 0; i + 1 < n; ++i) compare(set_at(i, 0), set_at(i + 1, 0));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i + 1 < n) compare(set_at(i, j), set_at(i + 1, j));
        if (j + 1 < n) compare(set_at(i, j), set_at(i, j + 1));
      }
  }
  return worst;
}

BandSweep band_sweep(const MetricGraph& g, double lambda_lo, double lambda_hi,
                     int n_theta, const ScanOptions& opts) {
  g.require_well_formed();
  const int p = g.period_rank;
  if (p < 1 || p > 2)
    throw std::invalid_argument("band_sweep supports period ranks 1 and 2");
  if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo))
    throw std::invalid_argument("band_sweep requires 0 < lambda_lo < lambda_hi");
  if (n_theta < 2)
    throw std::invalid_argument("band_sweep requires at least two grid points per dimension");

  BandSweep sweep;
  sweep.lambda_lo = lambda_lo;
  sweep.lambda_hi = lambda_hi;
  sweep.n_theta = n_theta;
  // Endpoints included: both theta = 0 and theta = 2 pi are sampled, so
  // refining 9 -> 17 -> 33 points keeps every old point on the grid.
  const double h = 2.0 * kPi / (n_theta - 1);
  if (p == 1) {
    for (int i = 0; i < n_theta; ++i) sweep.theta_grid.push_back({i * h});
  } else {
    for (int i = 0; i < n_theta; ++i)
      for (int j = 0; j < n_theta; ++j) sweep.theta_grid.push_back({i * h, j * h});
  }
  sweep.samples.resize(sweep.theta_grid.size());
  parallel_for(sweep.theta_grid.size(), [&](std::size_t idx) {
    sweep.samples[idx] = bloch_spectrum(g, sweep.theta_grid[idx], lambda_lo,
                                        lambda_hi, opts);
  });
  return sweep;
}

std::vector<GapInterval> find_gaps(const BandSweep& sweep, double min_width) {
  if (sweep.samples.empty())
    throw std::invalid_argument("find_gaps: sweep holds no samples");
  if (!(min_width >= 0.0))
    throw std::invalid_argument("find_gaps: min_width must be nonnegative");

  std::vector<double> all;
  for (const auto& s : sweep.samples)
    for (const auto& e : s.entries) all.push_back(e.lambda);
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  const double caveat = sweep.grid_resolution_caveat();
  std::vector<GapInterval> gaps;
  double cursor = sweep.lambda_lo;
  for (double lambda : all) {
    if (lambda - cursor > min_width) gaps.push_back({cursor, lambda, caveat});
    cursor = std::max(cursor, lambda);
  }
  if (sweep.lambda_hi - cursor > min_width)
    gaps.push_back({cursor, sweep.lambda_hi, caveat});
  return gaps;
}

GapReport certify_gap_near(const MetricGraph& base, const Decoration& dec,
                           const AttachmentMap* attach, double l0, int n,
                           const GapCertifyOptions& opts) {
  if (!(l0 > 0.0))
    throw ConditionViolatedError("certify_gap_near: l0 must be positive");
  if (n < 1 || n % 2 == 0)
    throw ConditionViolatedError(
        "certify_gap_near: n must be a positive odd integer; for even n the "
        "resonant edge mode has matching signs at both endpoints and the "
        "gap-opening mechanism fails");
  if (!check_spider_conditions(dec, l0))
    throw ConditionViolatedError(
        "certify_gap_near: decoration does not satisfy the resonator "
        "conditions (odd cycle of l0-edges reaching every boundary vertex "
        "through l0-edge paths)");

  const double k0 = n * kPi / l0;
  const double lambda0 = k0 * k0;
  const double r = dirichlet_edge_distance(base, lambda0);
  if (!(r > 0.0))
    throw ConditionViolatedError(
        "certify_gap_near: lambda0 collides with a Dirichlet resonance of a "
        "base edge");

  GapReport rep;
  rep.lambda0 = lambda0;
  rep.sigma_d_distance = r;
  rep.window_lo = lambda0 - r / 2.0;
  rep.window_hi = lambda0 + r / 2.0;
  rep.n_theta = opts.n_theta;

  const MetricGraph decorated = attach ? decorate_periodic(base, dec, attach)
                                       : decorate_periodic(base, dec);
  const BandSweep sweep = band_sweep(decorated, rep.window_lo, rep.window_hi,
                                     opts.n_theta, opts.scan);
  rep.grid_resolution_caveat = sweep.grid_resolution_caveat();

  // Samples within flat_tol of lambda0 are classified as the decoration flat
  // band; the gap margins are measured against everything else.
  bool flat_everywhere = true;
  int flat_mult = std::numeric_limits<int>::max();
  double below = rep.window_lo;
  double above = rep.window_hi;
  for (const auto& s : sweep.samples) {
    int here = 0;
    for (const auto& e : s.entries) {
      if (std::abs(e.lambda - lambda0) <= opts.flat_tol) {
        here += e.multiplicity;
        continue;
      }
      if (e.lambda < lambda0) below = std::max(below, e.lambda);
      if (e.lambda > lambda0) above = std::min(above, e.lambda);
    }
    if (here == 0) flat_everywhere = false;
    flat_mult = std::min(flat_mult, here);
  }
  rep.flat_band_at_lambda0 = flat_everywhere;
  rep.flat_band_multiplicity = flat_everywhere ? flat_mult : 0;
  rep.eps_below = lambda0 - below;
  rep.eps_above = above - lambda0;
  return rep;
}

}  // namespace qgraph
