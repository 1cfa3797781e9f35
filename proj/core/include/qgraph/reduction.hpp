#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "qgraph/decoration.hpp"
#include "qgraph/dtn.hpp"
#include "qgraph/eigensolve.hpp"

namespace qgraph {

// Secular matrix of the reduced problem: the base graph with every vertex
// disconnected into d edge ends, closed by the energy-dependent vertex
// condition (outgoing derivatives) = -Lambda(lambda) (values), where Lambda
// is the Dirichlet-to-Neumann matrix of the decoration and the edge ends are
// identified with boundary slots through the attachment map. Dimension
// 2 |E(base)|; rows are scaled like secular rows.
struct ReducedSecularMatrix {
  double lambda = 0.0;
  Eigen::MatrixXd entries;
};

struct ReducedScanOptions {
  int grid_points = 2000;          // lambda grid over the window
  double lambda_refine_tol = 1e-10;
  double tol_root = 1e-8;
  double tol_rank = 1e-7;
};

// Holds the base graph, decoration, attachment and the shared
// Dirichlet-to-Neumann evaluator.
class ReducedProblem {
public:
  ReducedProblem(MetricGraph base, Decoration dec,
                 const AttachmentMap* attach = nullptr, DtnOptions opts = {});
  ~ReducedProblem();

  // Throws PoleProximityError when lambda is within the pole guard of the
  // decoration's clamped spectrum.
  ReducedSecularMatrix build(double lambda) const;

  // Roots of sigma_min over the window; guarded lambdas are skipped.
  std::vector<SpectrumEntry> scan(double lambda_lo, double lambda_hi,
                                  const ReducedScanOptions& opts = {}) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ReducedSecularMatrix build_reduced(const MetricGraph& base, const Decoration& dec,
                                   const AttachmentMap* attach, double lambda,
                                   const DtnOptions& opts = {});

// Cross-check of the decorated spectrum against the reduced problem over a
// window. Eigenvalues within exclusion_radius of the clamped decoration
// spectrum or of a Dirichlet resonance of a base edge are removed from both
// sides before matching (the reduction is not equivalent there).
struct ReducedMatch {
  double direct_lambda = 0.0;
  double reduced_lambda = 0.0;
  int direct_multiplicity = 0;
  int reduced_multiplicity = 0;
  double difference = 0.0;
};

struct ReducedComparisonReport {
  std::vector<ReducedMatch> matched;
  std::vector<SpectrumEntry> direct_unmatched;
  std::vector<SpectrumEntry> reduced_unmatched;
  double max_difference = 0.0;  // over matched pairs
  std::vector<double> excluded_points;
};

ReducedComparisonReport reduced_spectrum_check(
    const MetricGraph& base, const Decoration& dec, const AttachmentMap* attach,
    double lambda_lo, double lambda_hi, double exclusion_radius = 1e-4,
    double match_tol = 1e-5, const ScanOptions& scan_opts = {},
    const ReducedScanOptions& reduced_opts = {});

}  // namespace qgraph
