#include "qgraph/secular.hpp"

#include <cmath>
#include <stdexcept>

namespace qgraph {

namespace detail {

EndCoeffs end_coeffs(double k, double length, bool at_end) {
  if (!at_end) return {1.0, 0.0, 0.0, 1.0};
  const double c = std::cos(k * length);
  const double s = std::sin(k * length);
  // value = a c + b s; outgoing derivative = -u'(l) = k (a s - b c).
  return {c, s, s, -c};
}

void normalize_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (n > 1.0) m.row(i) /= n;
  }
}

void normalize_rows(Eigen::MatrixXcd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double n = m.row(i).norm();
    if (n > 1.0) m.row(i) /= n;
  }
}

namespace {

// Shared assembly skeleton. Phase(end) supplies the Floquet factor of an
// edge end (1 for finite graphs); rows follow vertex id order, within a
// vertex: continuity between consecutive ends, then the Kirchhoff sum
// divided by k, or one value row per end at Dirichlet vertices.
template <typename Scalar, typename PhaseFn>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> assemble(
    const MetricGraph& g, double k, PhaseFn phase,
    std::vector<RowLabel>* row_labels) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = 2 * static_cast<int>(g.edges.size());
  Mat m = Mat::Zero(n, n);
  int row = 0;
  for (const auto& [vid, cond] : g.vertices) {
    const auto ends = g.incident_ends(vid);
    if (ends.empty()) continue;
    if (cond == VertexCondition::dirichlet) {
      for (const auto& end : ends) {
        const auto cf = end_coeffs(k, g.edges[end.edge].length, end.at_end);
        const Scalar p = phase(end);
        m(row, 2 * end.edge) += p * cf.va;
        m(row, 2 * end.edge + 1) += p * cf.vb;
        if (row_labels) row_labels->push_back({vid, RowKind::dirichlet});
        ++row;
      }
    } else {
      for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
        for (int which : {0, 1}) {
          const auto& end = which == 0 ? ends[i] : ends[i + 1];
          const auto cf = end_coeffs(k, g.edges[end.edge].length, end.at_end);
          const Scalar p = phase(end) * (which == 0 ? 1.0 : -1.0);
          m(row, 2 * end.edge) += p * cf.va;
          m(row, 2 * end.edge + 1) += p * cf.vb;
        }
        if (row_labels) row_labels->push_back({vid, RowKind::continuity});
        ++row;
      }
      for (const auto& end : ends) {
        const auto cf = end_coeffs(k, g.edges[end.edge].length, end.at_end);
        const Scalar p = phase(end);
        m(row, 2 * end.edge) += p * cf.da;
        m(row, 2 * end.edge + 1) += p * cf.db;
      }
      if (row_labels) row_labels->push_back({vid, RowKind::kirchhoff});
      ++row;
    }
  }
  if (row != n) throw std::logic_error("secular assembly row count mismatch");
  return m;
}

void require_scan_point(double k) {
  if (!(k > 0.0)) throw std::invalid_argument("secular matrix requires k > 0");
}

}  // namespace

Eigen::MatrixXd assemble_real(const MetricGraph& g, double k) {
  require_scan_point(k);
  auto m = assemble<double>(g, k, [](const EdgeEnd&) { return 1.0; }, nullptr);
  normalize_rows(m);
  return m;
}

Eigen::MatrixXcd assemble_complex(const MetricGraph& g, double k,
                                  const std::vector<double>& theta) {
  require_scan_point(k);
  if (static_cast<int>(theta.size()) != g.period_rank)
    throw std::invalid_argument("theta dimension must equal the period rank");
  const auto& edges = g.edges;
  auto phase = [&](const EdgeEnd& end) -> std::complex<double> {
    if (!end.at_end) return {1.0, 0.0};
    const auto& shift = edges[end.edge].shift;
    double dot = 0.0;
    for (std::size_t i = 0; i < shift.size() && i < theta.size(); ++i)
      dot += theta[i] * shift[i];
    if (dot == 0.0) return {1.0, 0.0};
    return std::exp(std::complex<double>(0.0, -dot));
  };
  auto m = assemble<std::complex<double>>(g, k, phase, nullptr);
  normalize_rows(m);
  return m;
}

}  // namespace detail

namespace {

std::vector<ColLabel> column_labels(const MetricGraph& g) {
  std::vector<ColLabel> cols;
  cols.reserve(2 * g.edges.size());
  for (const auto& e : g.edges) {
    cols.push_back({e.id, false});
    cols.push_back({e.id, true});
  }
  return cols;
}

}  // namespace

SecularMatrix build_secular(const MetricGraph& g, double k) {
  g.require_well_formed();
  if (!(k > 0.0)) throw std::invalid_argument("secular matrix requires k > 0");
  if (!g.is_finite())
    throw std::invalid_argument("build_secular requires a finite graph; use build_bloch_secular");
  SecularMatrix sm;
  auto m = detail::assemble<double>(g, k, [](const EdgeEnd&) { return 1.0; }, &sm.row_labels);
  detail::normalize_rows(m);
  sm.entries = m.cast<std::complex<double>>();
  sm.col_labels = column_labels(g);
  sm.is_real = true;
  return sm;
}

SecularMatrix build_bloch_secular(const MetricGraph& g, double k,
                                  const std::vector<double>& theta) {
  g.require_well_formed();
  if (!(k > 0.0)) throw std::invalid_argument("secular matrix requires k > 0");
  if (g.is_finite())
    throw std::invalid_argument("build_bloch_secular requires a periodic graph");
  if (static_cast<int>(theta.size()) != g.period_rank)
    throw std::invalid_argument("theta dimension must equal the period rank");
  const auto& edges = g.edges;
  auto phase = [&](const EdgeEnd& end) -> std::complex<double> {
    if (!end.at_end) return {1.0, 0.0};
    const auto& shift = edges[end.edge].shift;
    double dot = 0.0;
    for (std::size_t i = 0; i < shift.size() && i < theta.size(); ++i)
      dot += theta[i] * shift[i];
    if (dot == 0.0) return {1.0, 0.0};
    return std::exp(std::complex<double>(0.0, -dot));
  };
  SecularMatrix sm;
  auto m = detail::assemble<std::complex<double>>(g, k, phase, &sm.row_labels);
  detail::normalize_rows(m);
  sm.entries = std::move(m);
  sm.col_labels = column_labels(g);
  sm.is_real = false;
  return sm;
}

std::complex<double> EdgeSolution::value(int edge, double x) const {
  const auto& c = coeffs.at(edge);
  return c[0] * std::cos(k * x) + c[1] * std::sin(k * x);
}

std::complex<double> EdgeSolution::derivative(int edge, double x) const {
  const auto& c = coeffs.at(edge);
  return k * (-c[0] * std::sin(k * x) + c[1] * std::cos(k * x));
}

EdgeSolution solution_from_nullvector(const MetricGraph& g, double k,
                                      const Eigen::VectorXcd& nullvector) {
  if (!(k > 0.0)) throw std::invalid_argument("secular matrix requires k > 0");
  if (nullvector.size() != 2 * static_cast<Eigen::Index>(g.edges.size()))
    throw std::invalid_argument("null vector length must be twice the edge count");
  EdgeSolution sol;
  sol.k = k;
  sol.coeffs.resize(g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e)
    sol.coeffs[e] = {nullvector(2 * e), nullvector(2 * e + 1)};
  return sol;
}

}  // namespace qgraph
