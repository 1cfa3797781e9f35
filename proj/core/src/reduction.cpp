#include "qgraph/reduction.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "qgraph/errors.hpp"
#include "qgraph/parallel.hpp"
#include "qgraph/secular.hpp"

namespace qgraph {

namespace {

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
  constexpr double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

struct ReducedProblem::Impl {
  MetricGraph base;
  DtnEvaluator evaluator;
  // Attachment resolved once: boundary slot index for every edge end of the
  // base graph, per former vertex.
  std::vector<std::vector<std::pair<EdgeEnd, int>>> vertex_slots;
  std::vector<std::string> vertex_ids;

  Impl(MetricGraph b, Decoration dec, const AttachmentMap* attach, DtnOptions opts)
      : base(std::move(b)), evaluator(std::move(dec), opts) {
    base.require_well_formed();
    if (!base.is_finite())
      throw std::invalid_argument("reduced problem requires a finite base graph");
    const auto& d = evaluator.decoration();
    for (const auto& [vid, cond] : base.vertices) {
      if (cond != VertexCondition::kirchhoff)
        throw std::invalid_argument(
            "reduced problem requires all base vertices to carry standard conditions");
      const auto ends = base.incident_ends(vid);
      if (ends.size() != static_cast<std::size_t>(d.boundary_size()))
        throw std::invalid_argument("vertex '" + vid + "' has degree " +
                                    std::to_string(ends.size()) +
                                    " but the decoration exposes " +
                                    std::to_string(d.boundary_size()) +
                                    " boundary vertices");
      std::vector<std::pair<EdgeEnd, int>> slots;
      if (attach) {
        auto it = attach->find(vid);
        if (it == attach->end())
          throw std::invalid_argument("attachment map has no entry for vertex '" + vid + "'");
        if (it->second.size() != ends.size())
          throw std::invalid_argument("attachment for vertex '" + vid +
                                      "' does not cover its degree");
        for (const auto& slot : it->second) {
          int edge = -1;
          for (const auto& end : ends) {
            const auto& e = base.edges[end.edge];
            if (e.id == slot.edge_id && end.at_end == slot.at_end) {
              edge = end.edge;
              break;
            }
          }
          if (edge < 0)
            throw std::invalid_argument("attachment slot for vertex '" + vid +
                                        "' names edge end '" + slot.edge_id +
                                        "' which is not incident there");
          const int b = d.boundary_index(slot.boundary_vertex);
          if (b < 0)
            throw std::invalid_argument("attachment slot names unknown boundary vertex '" +
                                        slot.boundary_vertex + "'");
          slots.emplace_back(EdgeEnd{edge, slot.at_end}, b);
        }
      } else {
        for (std::size_t i = 0; i < ends.size(); ++i)
          slots.emplace_back(ends[i], static_cast<int>(i));
      }
      // Every boundary slot must be used exactly once per vertex.
      std::vector<bool> used(ends.size(), false);
      for (const auto& [end, b] : slots) {
        if (used[b])
          throw std::invalid_argument("attachment for vertex '" + vid +
                                      "' uses a boundary vertex twice");
        used[b] = true;
      }
      vertex_ids.push_back(vid);
      vertex_slots.push_back(std::move(slots));
    }
  }

  ReducedSecularMatrix build(double lambda) const {
    if (!(lambda > 0.0))
      throw std::invalid_argument("reduced secular matrix requires lambda > 0");
    const DtnMatrix dtn = evaluator.evaluate(lambda);
    const double k = std::sqrt(lambda);
    const int n = 2 * static_cast<int>(base.edges.size());
    ReducedSecularMatrix out;
    out.lambda = lambda;
    out.entries = Eigen::MatrixXd::Zero(n, n);

    int row = 0;
    for (std::size_t vi = 0; vi < vertex_slots.size(); ++vi) {
      const auto& slots = vertex_slots[vi];
      // One row per former slot j: derivative of the edge attached at slot j
      // plus the DtN response to the values seen at all slots.
      for (const auto& [end_j, bj] : slots) {
        const auto cf_j =
            detail::end_coeffs(k, base.edges[end_j.edge].length, end_j.at_end);
        out.entries(row, 2 * end_j.edge) += k * cf_j.da;
        out.entries(row, 2 * end_j.edge + 1) += k * cf_j.db;
        for (const auto& [end_m, bm] : slots) {
          const auto cf_m =
              detail::end_coeffs(k, base.edges[end_m.edge].length, end_m.at_end);
          out.entries(row, 2 * end_m.edge) += dtn.entries(bj, bm) * cf_m.va;
          out.entries(row, 2 * end_m.edge + 1) += dtn.entries(bj, bm) * cf_m.vb;
        }
        ++row;
      }
    }
    if (row != n) throw std::logic_error("reduced matrix row count mismatch");
    return out;
  }

  double sigma_min(double lambda) const {
    const ReducedSecularMatrix m = build(lambda);
    Eigen::MatrixXd scaled = m.entries;
    detail::normalize_rows(scaled);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    const auto& s = svd.singularValues();
    return s(s.size() - 1);
  }

  int multiplicity(double lambda, double tol_rank) const {
    const ReducedSecularMatrix m = build(lambda);
    Eigen::MatrixXd scaled = m.entries;
    detail::normalize_rows(scaled);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    const auto& s = svd.singularValues();
    const double smax = s(0);
    int count = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) < tol_rank * std::max(smax, 1.0)) ++count;
    return count;
  }

  std::vector<SpectrumEntry> scan(double lo, double hi,
                                  const ReducedScanOptions& opts) const {
    if (!(lo > 0.0) || !(hi > lo))
      throw std::invalid_argument("reduced scan requires 0 < lambda_lo < lambda_hi");
    if (opts.grid_points < 2)
      throw std::invalid_argument("reduced scan requires at least two grid points");

    const int n = opts.grid_points;
    std::vector<double> grid(n);
    std::vector<double> sigma(n, std::numeric_limits<double>::quiet_NaN());
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (int i = 0; i < n; ++i) grid[i] = lo + h * i;
    grid.back() = hi;

    // Pole-guarded points stay NaN and never form bracket candidates.
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
      try {
        sigma[i] = sigma_min(grid[i]);
      } catch (const PoleProximityError&) {
      } catch (const SingularSolveError&) {
      }
    });

    auto ok = [&](int i) { return std::isfinite(sigma[i]); };
    std::vector<std::pair<double, double>> brackets;
    for (int i = 0; i < n; ++i) {
      if (!ok(i)) continue;
      const bool left_ok = i > 0 && ok(i - 1);
      const bool right_ok = i + 1 < n && ok(i + 1);
      const bool is_min = (!left_ok || sigma[i] <= sigma[i - 1]) &&
                          (!right_ok || sigma[i] <= sigma[i + 1]);
      if (!is_min || sigma[i] >= 1.0) continue;
      const double a = left_ok ? grid[i - 1] : std::max(grid[i] - h, 0.5 * grid[i]);
      const double b = right_ok ? grid[i + 1] : grid[i] + h;
      brackets.emplace_back(a, b);
    }

    std::vector<SpectrumEntry> found;
    std::mutex found_mutex;
    auto guarded_sigma = [&](double lambda) {
      try {
        return sigma_min(lambda);
      } catch (const PoleProximityError&) {
        return std::numeric_limits<double>::infinity();
      } catch (const SingularSolveError&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    parallel_for(brackets.size(), [&](std::size_t bi) {
      const double lambda =
          golden_min(guarded_sigma, brackets[bi].first, brackets[bi].second,
                     opts.lambda_refine_tol);
      double residual;
      int mult;
      try {
        residual = sigma_min(lambda);
        mult = multiplicity(lambda, opts.tol_rank);
      } catch (const PoleProximityError&) {
        return;
      } catch (const SingularSolveError&) {
        return;
      }
      if (residual >= opts.tol_root) return;
      std::lock_guard<std::mutex> lock(found_mutex);
      found.push_back({lambda, mult, residual, false});
    });

    std::sort(found.begin(), found.end(),
              [](const SpectrumEntry& a, const SpectrumEntry& b) {
                return a.lambda < b.lambda;
              });
    std::vector<SpectrumEntry> merged;
    const double merge_tol = 100.0 * opts.lambda_refine_tol;
    for (const auto& e : found) {
      if (!merged.empty() && e.lambda - merged.back().lambda < merge_tol) {
        if (e.residual < merged.back().residual) merged.back() = e;
        continue;
      }
      if (e.lambda < lo || e.lambda >= hi) continue;
      merged.push_back(e);
    }
    return merged;
  }
};

ReducedProblem::ReducedProblem(MetricGraph base, Decoration dec,
                               const AttachmentMap* attach, DtnOptions opts)
    : impl_(new Impl(std::move(base), std::move(dec), attach, opts)) {}

ReducedProblem::~ReducedProblem() = default;

ReducedSecularMatrix ReducedProblem::build(double lambda) const {
  return impl_->build(lambda);
}

std::vector<SpectrumEntry> ReducedProblem::scan(double lambda_lo, double lambda_hi,
                                                const ReducedScanOptions& opts) const {
  return impl_->scan(lambda_lo, lambda_hi, opts);
}

ReducedSecularMatrix build_reduced(const MetricGraph& base, const Decoration& dec,
                                   const AttachmentMap* attach, double lambda,
                                   const DtnOptions& opts) {
  ReducedProblem problem(base, dec, attach, opts);
  return problem.build(lambda);
}

ReducedComparisonReport reduced_spectrum_check(
    const MetricGraph& base, const Decoration& dec, const AttachmentMap* attach,
    double lambda_lo, double lambda_hi, double exclusion_radius, double match_tol,
    const ScanOptions& scan_opts, const ReducedScanOptions& reduced_opts) {
  if (!(exclusion_radius > 0.0))
    throw std::invalid_argument("reduced_spectrum_check: exclusion radius must be positive");

  const MetricGraph decorated =
      attach ? decorate(base, dec, attach) : decorate(base, dec);
  const SpectrumResult direct =
      scan_spectrum(decorated, std::max(lambda_lo, 1e-8), lambda_hi, scan_opts);

  ReducedProblem problem(base, dec, attach, DtnOptions{});
  const std::vector<SpectrumEntry> reduced =
      problem.scan(std::max(lambda_lo, 1e-8), lambda_hi, reduced_opts);

  // Excluded regions: near the clamped decoration spectrum (reduction poles)
  // and near the base graph's Dirichlet edge values (where end coefficients
  // degenerate).
  std::vector<double> excluded;
  {
    auto poles = dirichlet_spectrum_G(dec, lambda_hi + 1.0, scan_opts);
    for (const auto& p : poles.entries) excluded.push_back(p.lambda);
    for (const auto& [v, m] : dirichlet_edge_spectrum(base, lambda_hi + 1.0))
      excluded.push_back(v);
    std::sort(excluded.begin(), excluded.end());
  }
  auto is_excluded = [&](double lambda) {
    for (double c : excluded)
      if (std::abs(lambda - c) <= exclusion_radius) return true;
    return false;
  };

  ReducedComparisonReport rep;
  rep.excluded_points = excluded;

  std::vector<SpectrumEntry> direct_kept;
  for (const auto& e : direct.entries)
    if (!is_excluded(e.lambda)) direct_kept.push_back(e);
  std::vector<SpectrumEntry> reduced_kept;
  for (const auto& e : reduced)
    if (!is_excluded(e.lambda)) reduced_kept.push_back(e);

  std::vector<bool> used(reduced_kept.size(), false);
  rep.max_difference = 0.0;
  for (const auto& de : direct_kept) {
    int best = -1;
    double best_diff = match_tol;
    for (std::size_t i = 0; i < reduced_kept.size(); ++i) {
      if (used[i]) continue;
      const double diff = std::abs(reduced_kept[i].lambda - de.lambda);
      if (diff <= best_diff) {
        best_diff = diff;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      rep.direct_unmatched.push_back(de);
      continue;
    }
    used[best] = true;
    ReducedMatch m;
    m.direct_lambda = de.lambda;
    m.reduced_lambda = reduced_kept[best].lambda;
    m.direct_multiplicity = de.multiplicity;
    m.reduced_multiplicity = reduced_kept[best].multiplicity;
    m.difference = best_diff;
    rep.max_difference = std::max(rep.max_difference, best_diff);
    rep.matched.push_back(m);
  }
  for (std::size_t i = 0; i < reduced_kept.size(); ++i)
    if (!used[i]) rep.reduced_unmatched.push_back(reduced_kept[i]);
  return rep;
}

}  // namespace qgraph
