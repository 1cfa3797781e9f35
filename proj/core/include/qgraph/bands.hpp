#pragma once

#include <vector>

#include "qgraph/decoration.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

// Band samples of a periodic graph: one Bloch spectrum per point of a uniform
// quasi-momentum grid over [0, 2pi]^p, endpoints included, p = period_rank in
// {1, 2}. n_theta >= 2 points per dimension, step 2 pi / (n_theta - 1).
struct BandSweep {
  std::vector<std::vector<double>> theta_grid;  // row-major over grid indices
  std::vector<SpectrumResult> samples;          // aligned with theta_grid
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int n_theta = 0;  // grid points per dimension

  // Maximum variation of the sampled band sets between adjacent quasi-momentum
  // grid points (symmetric Hausdorff distance). A large value means the grid
  // is too coarse for gap edges to be trusted.
  double grid_resolution_caveat() const;
};

BandSweep band_sweep(const MetricGraph& g, double lambda_lo, double lambda_hi,
                     int n_theta, const ScanOptions& opts = {});

// Maximal open subintervals of the window free of band samples and wider than
// min_width.
struct GapInterval {
  double lo = 0.0;
  double hi = 0.0;
  double caveat = 0.0;  // grid_resolution_caveat of the sweep
};

std::vector<GapInterval> find_gaps(const BandSweep& sweep, double min_width);

// Certification that decorating a periodic graph opens a gap around
// lambda0 = (n*pi/l0)^2.
struct GapReport {
  double lambda0 = 0.0;
  double sigma_d_distance = 0.0;  // distance from lambda0 to base resonances
  double window_lo = 0.0;
  double window_hi = 0.0;
  int n_theta = 0;
  bool flat_band_at_lambda0 = false;  // samples within flat_tol at every theta
  int flat_band_multiplicity = 0;     // minimum over theta when flagged
  double eps_below = 0.0;  // distance from lambda0 down to the nearest sample
  double eps_above = 0.0;  // (samples within flat_tol of lambda0 excluded)
  double grid_resolution_caveat = 0.0;
};

struct GapCertifyOptions {
  int n_theta = 17;
  double flat_tol = 1e-6;
  ScanOptions scan;
};

// Requires n odd, the decoration to satisfy check_spider_conditions(dec, l0),
// and lambda0 to avoid the Dirichlet resonances of the base edges (distance
// r > 0); throws ConditionViolatedError otherwise. Decorates the base graph,
// sweeps the window (lambda0 - r/2, lambda0 + r/2) and reports the empirical
// punctured-gap margins around lambda0.
GapReport certify_gap_near(const MetricGraph& base, const Decoration& dec,
                           const AttachmentMap* attach, double l0, int n,
                           const GapCertifyOptions& opts = {});

}  // namespace qgraph
