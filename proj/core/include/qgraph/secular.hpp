#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// Per-edge trial function u_e(x) = a_e cos(kx) + b_e sin(kx), x in [0, l_e]
// measured from the start vertex. Columns of the secular matrix are the
// coefficients (a_0, b_0, a_1, b_1, ...) in edge order.

enum class RowKind { continuity, kirchhoff, dirichlet };

struct RowLabel {
  std::string vertex;
  RowKind kind = RowKind::continuity;
};

struct ColLabel {
  std::string edge_id;
  bool sine = false;  // false: cos coefficient a_e, true: sin coefficient b_e
};

// Square matrix of dimension 2|E| whose rank drops exactly at eigenvalues
// lambda = k^2. Kirchhoff derivative rows are divided by k; rows with norm
// above one are scaled to unit norm (smaller rows are kept as assembled so
// sigma_min stays continuous where a loop row degenerates at k*l = 2*pi*n).
// Entries are real for finite graphs.
struct SecularMatrix {
  Eigen::MatrixXcd entries;
  std::vector<RowLabel> row_labels;
  std::vector<ColLabel> col_labels;
  bool is_real = false;
};

SecularMatrix build_secular(const MetricGraph& g, double k);

// Quasi-momentum version for periodic graphs: contributions of an edge end
// with shift s enter its vertex rows multiplied by exp(-i theta . s).
// theta.size() must equal g.period_rank.
SecularMatrix build_bloch_secular(const MetricGraph& g, double k,
                                  const std::vector<double>& theta);

// Eigenfunction evaluation from a null vector of the (finite or Bloch)
// secular matrix.
struct EdgeSolution {
  double k = 0.0;
  std::vector<std::array<std::complex<double>, 2>> coeffs;  // (a_e, b_e)

  std::complex<double> value(int edge, double x) const;
  // d/dx at x, in the direction of increasing edge coordinate.
  std::complex<double> derivative(int edge, double x) const;
};

EdgeSolution solution_from_nullvector(const MetricGraph& g, double k,
                                      const Eigen::VectorXcd& nullvector);

namespace detail {

// Coefficients of the endpoint data of one edge end in terms of (a_e, b_e):
// value = va*a + vb*b, outgoing derivative (from the vertex into the edge)
// = k * (da*a + db*b).
struct EndCoeffs {
  double va, vb, da, db;
};

EndCoeffs end_coeffs(double k, double length, bool at_end);

// Fast assembly without labels, used by the scanning paths.
Eigen::MatrixXd assemble_real(const MetricGraph& g, double k);
Eigen::MatrixXcd assemble_complex(const MetricGraph& g, double k,
                                  const std::vector<double>& theta);

// Scale rows with norm above one to unit norm.
void normalize_rows(Eigen::MatrixXd& m);
void normalize_rows(Eigen::MatrixXcd& m);

}  // namespace detail

}  // namespace qgraph
