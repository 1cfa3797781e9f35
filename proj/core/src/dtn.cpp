#include "qgraph/dtn.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qgraph/errors.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

namespace {

void require_decoration_graph(const Decoration& dec) {
  dec.graph.require_well_formed();
  if (!dec.graph.is_finite())
    throw std::invalid_argument("decoration graph must be finite");
  if (dec.boundary.empty())
    throw std::invalid_argument("decoration has no boundary vertices");
  std::set<std::string> seen;
  for (const auto& b : dec.boundary) {
    if (!dec.graph.vertices.count(b))
      throw std::invalid_argument("boundary vertex '" + b + "' is not in the decoration");
    if (!seen.insert(b).second)
      throw std::invalid_argument("boundary vertex '" + b + "' listed twice");
  }
}

MetricGraph clamped_graph(const Decoration& dec) {
  MetricGraph g = dec.graph;
  for (auto& [vid, cond] : g.vertices) cond = VertexCondition::kirchhoff;
  for (const auto& b : dec.boundary) g.vertices[b] = VertexCondition::dirichlet;
  return g;
}

// Interior system at k: value rows at boundary vertices (right hand side
// selects the prescribed boundary value), continuity + Kirchhoff rows at
// interior vertices. `neumann` maps coefficients to the boundary vector of
// outgoing-derivative sums.
struct InteriorSystem {
  Eigen::MatrixXd a;        // 2|E| x 2|E|
  Eigen::MatrixXd rhs_map;  // 2|E| x d, column j = right hand side for e_j
  Eigen::MatrixXd neumann;  // d x 2|E|
};

InteriorSystem build_interior(const Decoration& dec, double k) {
  const auto& g = dec.graph;
  const int n = 2 * static_cast<int>(g.edges.size());
  const int d = dec.boundary_size();
  InteriorSystem sys;
  sys.a = Eigen::MatrixXd::Zero(n, n);
  sys.rhs_map = Eigen::MatrixXd::Zero(n, d);
  sys.neumann = Eigen::MatrixXd::Zero(d, n);

  int row = 0;
  for (const auto& [vid, cond] : g.vertices) {
    const auto ends = g.incident_ends(vid);
    const int b = dec.boundary_index(vid);
    if (b >= 0) {
      for (const auto& end : ends) {
        const auto cf = detail::end_coeffs(k, g.edges[end.edge].length, end.at_end);
        sys.a(row, 2 * end.edge) += cf.va;
        sys.a(row, 2 * end.edge + 1) += cf.vb;
        sys.rhs_map(row, b) = 1.0;
        ++row;
        sys.neumann(b, 2 * end.edge) += k * cf.da;
        sys.neumann(b, 2 * end.edge + 1) += k * cf.db;
      }
    } else {
      if (ends.empty()) continue;
      for (std::size_t i = 0; i + 1 < ends.size(); ++i) {
        for (int which : {0, 1}) {
          const auto& end = which == 0 ? ends[i] : ends[i + 1];
          const auto cf = detail::end_coeffs(k, g.edges[end.edge].length, end.at_end);
          const double sgn = which == 0 ? 1.0 : -1.0;
          sys.a(row, 2 * end.edge) += sgn * cf.va;
          sys.a(row, 2 * end.edge + 1) += sgn * cf.vb;
        }
        ++row;
      }
      for (const auto& end : ends) {
        const auto cf = detail::end_coeffs(k, g.edges[end.edge].length, end.at_end);
        sys.a(row, 2 * end.edge) += cf.da;
        sys.a(row, 2 * end.edge + 1) += cf.db;
      }
      ++row;
    }
  }
  if (row != n)
    throw std::logic_error("interior system row count mismatch");
  return sys;
}

}  // namespace

SpectrumResult dirichlet_spectrum_G(const Decoration& dec, double lambda_max,
                                    const ScanOptions& opts) {
  require_decoration_graph(dec);
  if (!(lambda_max > 0.0))
    throw std::invalid_argument("dirichlet_spectrum_G: lambda_max must be positive");
  // Scan essentially from zero: the clamped problem has no zero mode because
  // the boundary is nonempty and clamped.
  const double floor = std::min(1e-8, lambda_max / 2.0);
  return scan_spectrum(clamped_graph(dec), floor, lambda_max, opts);
}

struct DtnEvaluator::Impl {
  Decoration dec;
  DtnOptions opts;
  mutable std::mutex mutex;
  mutable std::vector<double> poles;       // flattened eigenvalues
  mutable double cached_up_to = 0.0;

  void ensure_cache(double lambda) const {
    std::lock_guard<std::mutex> lock(mutex);
    const double need = lambda * 1.25 + 1.0;
    if (need <= cached_up_to) return;
    const double target = need * 1.2;
    auto spec = dirichlet_spectrum_G(dec, target, opts.scan);
    poles.clear();
    for (const auto& e : spec.entries) poles.push_back(e.lambda);
    cached_up_to = target;
  }

  double pole_distance(double lambda) const {
    ensure_cache(lambda);
    std::lock_guard<std::mutex> lock(mutex);
    double best = std::numeric_limits<double>::infinity();
    for (double p : poles) best = std::min(best, std::abs(lambda - p));
    return best;
  }
};

DtnEvaluator::DtnEvaluator(Decoration dec, DtnOptions opts)
    : impl_(new Impl{std::move(dec), opts, {}, {}, 0.0}) {
  require_decoration_graph(impl_->dec);
}

DtnEvaluator::~DtnEvaluator() = default;

const Decoration& DtnEvaluator::decoration() const { return impl_->dec; }
const DtnOptions& DtnEvaluator::options() const { return impl_->opts; }

double DtnEvaluator::pole_distance(double lambda) const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("pole_distance: lambda must be positive");
  return impl_->pole_distance(lambda);
}

DtnMatrix DtnEvaluator::evaluate(double lambda) const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("Dirichlet-to-Neumann matrix requires lambda > 0");
  const double dist = impl_->pole_distance(lambda);
  if (dist <= impl_->opts.pole_guard) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " is within " << dist
        << " of the clamped decoration spectrum (guard "
        << impl_->opts.pole_guard << ")";
    throw PoleProximityError(msg.str());
  }

  const double k = std::sqrt(lambda);
  const auto sys = build_interior(impl_->dec, k);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double rcond = sv(sv.size() - 1) / sv(0);
  if (!(rcond > impl_->opts.rcond_floor)) {
    std::ostringstream msg;
    msg << "interior solve at lambda = " << lambda
        << " has reciprocal condition " << rcond << " (floor "
        << impl_->opts.rcond_floor << ")";
    throw SingularSolveError(msg.str());
  }

  DtnMatrix out;
  out.lambda = lambda;
  out.condition_estimate = rcond;
  out.entries = sys.neumann * svd.solve(sys.rhs_map);
  return out;
}

DtnMatrix dtn_matrix(const Decoration& dec, double lambda, const DtnOptions& opts) {
  DtnEvaluator ev(dec, opts);
  return ev.evaluate(lambda);
}

Eigen::MatrixXd solvable_at(const Decoration& dec, double lambda0) {
  require_decoration_graph(dec);
  if (!(lambda0 > 0.0))
    throw std::invalid_argument("solvable_at: lambda0 must be positive");
  const double k = std::sqrt(lambda0);
  const auto sys = build_interior(dec, k);
  const int d = dec.boundary_size();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  constexpr double tol_rank = 1e-7;
  std::vector<int> null_rows;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) < tol_rank * std::max(smax, 1.0)) null_rows.push_back(static_cast<int>(i));

  if (null_rows.empty()) return Eigen::MatrixXd::Identity(d, d);

  // Solvability: the right hand side must be orthogonal to every left null
  // vector; constraints are linear in the boundary values.
  Eigen::MatrixXd constraints(null_rows.size(), d);
  for (std::size_t i = 0; i < null_rows.size(); ++i)
    constraints.row(i) = svd.matrixU().col(null_rows[i]).transpose() * sys.rhs_map;

  Eigen::JacobiSVD<Eigen::MatrixXd> csvd(constraints, Eigen::ComputeFullV);
  const auto& cs = csvd.singularValues();
  const double cmax = cs.size() > 0 ? cs(0) : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < cs.size(); ++i)
    if (cs(i) >= tol_rank * std::max(cmax, 1.0)) ++rank;
  const int null_dim = d - rank;
  Eigen::MatrixXd basis(d, null_dim);
  for (int j = 0; j < null_dim; ++j) basis.col(j) = csvd.matrixV().col(rank + j);
  return basis;
}

PoleScalingReport pole_scaling(const Decoration& dec, double lambda0,
                               const std::vector<double>& deltas,
                               const DtnOptions& opts) {
  require_decoration_graph(dec);
  if (!(lambda0 > 0.0))
    throw std::invalid_argument("pole_scaling: lambda0 must be positive");
  if (deltas.empty())
    throw std::invalid_argument("pole_scaling: need at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0))
      throw std::invalid_argument("pole_scaling: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw std::invalid_argument("pole_scaling: deltas must be strictly decreasing");
  }
  const double max_delta = deltas.front();
  const double min_delta = deltas.back();
  if (lambda0 - max_delta <= 0.0)
    throw std::invalid_argument("pole_scaling: lambda0 - max(delta) must stay positive");

  // The probe approaches lambda0 itself, so the guard must not block it;
  // isolation from the *other* poles is a precondition instead.
  DtnOptions probe = opts;
  probe.pole_guard = std::min(opts.pole_guard, min_delta / 10.0);
  DtnEvaluator ev(dec, probe);

  {
    auto spec = dirichlet_spectrum_G(dec, lambda0 + 20.0 * max_delta, probe.scan);
    const double self_tol = 1e-9 * std::max(1.0, lambda0);
    for (const auto& e : spec.entries) {
      if (std::abs(e.lambda - lambda0) <= self_tol) continue;
      if (std::abs(e.lambda - lambda0) <= 10.0 * max_delta)
        throw std::invalid_argument(
            "pole_scaling: lambda0 is not isolated: another clamped eigenvalue at " +
            std::to_string(e.lambda) + " lies within 10*max(delta)");
    }
  }

  PoleScalingReport rep;
  rep.lambda0 = lambda0;
  for (double delta : deltas) {
    double smin = std::numeric_limits<double>::infinity();
    double smax = 0.0;
    bool have = false;
    for (double lambda : {lambda0 - delta, lambda0 + delta}) {
      if (!(lambda > 0.0)) continue;
      try {
        const DtnMatrix m = ev.evaluate(lambda);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m.entries);
        const auto& s = svd.singularValues();
        smin = std::min(smin, s(s.size() - 1));
        smax = std::max(smax, s(0));
        have = true;
      } catch (const PoleProximityError&) {
        // recorded below when both sides fail
      } catch (const SingularSolveError&) {
      }
    }
    if (have) {
      rep.samples.push_back({delta, smin, smax});
    } else {
      rep.skipped_deltas.push_back(delta);
    }
  }

  if (rep.samples.size() >= 2) {
    // Least squares of log sigma_min against log delta.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.samples.size());
    for (const auto& s : rep.samples) {
      const double x = std::log(s.delta), y = std::log(s.sigma_min);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.fitted_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double logc = 0.0;
    for (const auto& s : rep.samples) logc += std::log(s.sigma_min) + std::log(s.delta);
    rep.fitted_C = std::exp(logc / n);
  }
  return rep;
}

}  // namespace qgraph
