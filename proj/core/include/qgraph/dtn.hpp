#pragma once

#include <Eigen/Dense>
#include <memory>
#include <mutex>
#include <vector>

#include "qgraph/decoration.hpp"
#include "qgraph/eigensolve.hpp"
#include "qgraph/graph.hpp"

namespace qgraph {

struct DtnOptions {
  double pole_guard = 1e-6;   // required distance from lambda to sigma(H_G)
  double rcond_floor = 1e-13; // minimum reciprocal condition of the solve
  ScanOptions scan;           // used for the clamped interior spectrum
};

// Dirichlet-to-Neumann matrix of a decoration at energy lambda: entry (i, j)
// is the sum of outgoing derivatives (pointing from boundary vertex i into
// the decoration) of the interior solution with boundary values e_j.
// Symmetric up to solve error.
struct DtnMatrix {
  double lambda = 0.0;
  Eigen::MatrixXd entries;
  double condition_estimate = 0.0;  // rcond of the interior solve
};

// Spectrum of the decoration clamped at its boundary (Dirichlet at every
// boundary vertex, Kirchhoff elsewhere); these are the poles of the
// Dirichlet-to-Neumann matrix.
SpectrumResult dirichlet_spectrum_G(const Decoration& dec, double lambda_max,
                                    const ScanOptions& opts = {});

// Evaluates the Dirichlet-to-Neumann matrix of a fixed decoration. Caches the
// clamped spectrum for the pole guard; safe to share across threads.
class DtnEvaluator {
public:
  explicit DtnEvaluator(Decoration dec, DtnOptions opts = {});
  ~DtnEvaluator();

  // Throws PoleProximityError when lambda is within pole_guard of the clamped
  // spectrum, SingularSolveError when the interior solve is unreliable.
  DtnMatrix evaluate(double lambda) const;

  // Distance from lambda to the clamped spectrum (cached scan).
  double pole_distance(double lambda) const;

  const Decoration& decoration() const;
  const DtnOptions& options() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot convenience wrapper around DtnEvaluator.
DtnMatrix dtn_matrix(const Decoration& dec, double lambda,
                     const DtnOptions& opts = {});

// Boundary values phi for which the clamped interior problem at lambda0 is
// solvable: the null space of the solvability constraints given by the left
// null vectors of the interior system. Columns form an orthonormal basis;
// zero columns means no nonzero phi is admissible (uniform blow-up of the
// Dirichlet-to-Neumann matrix near lambda0), d columns means lambda0 is not
// in the clamped spectrum.
Eigen::MatrixXd solvable_at(const Decoration& dec, double lambda0);

// Measures the blow-up rate of the Dirichlet-to-Neumann matrix near lambda0.
// For each delta both lambda0 - delta and lambda0 + delta are evaluated (the
// smaller sigma_min and the larger sigma_max are recorded); deltas whose both
// sides fail the pole guard against other poles are skipped. The fit is a
// log-log least squares of sigma_min against delta: slope -1 with
// fitted_C ~ |residue| signals uniform blow-up.
struct PoleScalingSample {
  double delta = 0.0;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

struct PoleScalingReport {
  double lambda0 = 0.0;
  std::vector<PoleScalingSample> samples;
  std::vector<double> skipped_deltas;
  double fitted_slope = 0.0;
  double fitted_C = 0.0;
};

// Requires deltas positive, strictly decreasing, and lambda0 isolated in the
// clamped spectrum: no other pole within 10 * max(delta).
PoleScalingReport pole_scaling(const Decoration& dec, double lambda0,
                               const std::vector<double>& deltas,
                               const DtnOptions& opts = {});

}  // namespace qgraph
