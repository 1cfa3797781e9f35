#pragma once

#include <cstddef>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

struct ScanOptions {
  double tol_root = 1e-8;    // accept a refined dip as a root below this
  double tol_rank = 1e-7;    // multiplicity: sigma_j < tol_rank * sigma_max
  double k_refine_tol = 1e-11;  // golden-section bracket width in k
  double trigger = 1.0;      // refine local minima of sigma_min below this
  double grid_step_factor = 4.0;  // grid step = pi / (factor * total length)
  std::size_t max_grid_points = 10'000'000;
};

struct SpectrumEntry {
  double lambda = 0.0;
  int multiplicity = 1;
  double residual = 0.0;     // sigma_min at the accepted root
  bool near_dirichlet_edge_value = false;  // within 1e-9 of (n*pi/l_e)^2
};

struct SpectrumResult {
  std::vector<SpectrumEntry> entries;  // strictly increasing in lambda
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  ScanOptions options;

  int total_multiplicity() const;
};

// Eigenvalues of the finite graph in the half-open window [lambda_lo,
// lambda_hi), found by scanning sigma_min of the secular matrix over a k grid
// and refining every local dip. lambda = 0 is never scanned; see
// zero_eigenvalue_multiplicity. Requires 0 < lambda_lo < lambda_hi.
SpectrumResult scan_spectrum(const MetricGraph& g, double lambda_lo,
                             double lambda_hi, const ScanOptions& opts = {});

// Same for the Bloch fiber at quasi-momentum theta of a periodic graph.
SpectrumResult bloch_spectrum(const MetricGraph& g,
                              const std::vector<double>& theta,
                              double lambda_lo, double lambda_hi,
                              const ScanOptions& opts = {});

// Multiplicity of lambda = 0: the number of connected components that carry
// no Dirichlet vertex (constant functions). Reported analytically because the
// k grid cannot start at zero.
int zero_eigenvalue_multiplicity(const MetricGraph& g);

// Counting-function sanity check against N(lambda) ~ L sqrt(lambda) / pi.
// Deviations above |V| + |E| indicate missed roots or wrong multiplicities.
struct WeylReport {
  double max_deviation = 0.0;
  double flag_threshold = 0.0;  // |V| + |E|
  bool suspicious = false;
};

WeylReport weyl_check(const SpectrumResult& result, const MetricGraph& g);

}  // namespace qgraph
