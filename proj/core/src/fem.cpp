#include "qgraph/fem.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

namespace qgraph {

namespace {

struct Mesh {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  int unknowns = 0;
};

// Piecewise-linear elements, ceil(l_e / h) equal subintervals per edge.
// Unknown layout: retained (non-Dirichlet) vertices first, then interior
// nodes edge by edge. Dirichlet vertices map to index -1 and are dropped.
Mesh assemble(const MetricGraph& g, double h) {
  std::map<std::string, int> vmap;
  int next = 0;
  for (const auto& [vid, cond] : g.vertices)
    vmap[vid] = (cond == VertexCondition::dirichlet) ? -1 : next++;

  std::vector<Eigen::Triplet<double>> kt, mt;
  auto add = [&](std::vector<Eigen::Triplet<double>>& t, int i, int j, double v) {
    if (i >= 0 && j >= 0) t.emplace_back(i, j, v);
  };

  for (const auto& e : g.edges) {
    const int m = static_cast<int>(std::ceil(e.length / h));
    const double he = e.length / m;
    std::vector<int> nodes(m + 1);
    nodes[0] = vmap.at(e.start);
    nodes[m] = vmap.at(e.end);
    for (int i = 1; i < m; ++i) nodes[i] = next++;
    for (int i = 0; i < m; ++i) {
      const int a = nodes[i], b = nodes[i + 1];
      const double kd = 1.0 / he, ko = -1.0 / he;
      const double md = he / 3.0, mo = he / 6.0;
      add(kt, a, a, kd);
      add(kt, b, b, kd);
      add(kt, a, b, ko);
      add(kt, b, a, ko);
      add(mt, a, a, md);
      add(mt, b, b, md);
      add(mt, a, b, mo);
      add(mt, b, a, mo);
    }
  }

  Mesh mesh;
  mesh.unknowns = next;
  mesh.stiffness.resize(next, next);
  mesh.mass.resize(next, next);
  mesh.stiffness.setFromTriplets(kt.begin(), kt.end());
  mesh.mass.setFromTriplets(mt.begin(), mt.end());
  return mesh;
}

}  // namespace

std::vector<double> fem_spectrum(const MetricGraph& g, double h, int count) {
  g.require_well_formed();
  if (!g.is_finite())
    throw std::invalid_argument("fem_spectrum requires a finite graph");
  if (count < 1 || count > 20)
    throw std::invalid_argument("fem_spectrum supports 1 to 20 eigenvalues");
  if (g.edges.size() > 40)
    throw std::invalid_argument("fem_spectrum supports at most 40 edges");
  double min_len = std::numeric_limits<double>::infinity();
  for (const auto& e : g.edges) min_len = std::min(min_len, e.length);
  if (g.edges.empty()) throw std::invalid_argument("graph has no edges");
  if (!(h > 0.0) || h > min_len / 4.0)
    throw std::invalid_argument("mesh too coarse: h must be at most (min edge length)/4");

  const Mesh mesh = assemble(g, h);
  const int n = mesh.unknowns;
  if (n < 1) throw std::invalid_argument("no degrees of freedom after elimination");

  // Inverse subspace iteration on the shifted pencil (K + M) y = M x with
  // Rayleigh-Ritz extraction. The shift keeps the factor positive definite
  // even when constants are in the kernel of K.
  Eigen::SparseMatrix<double> shifted = mesh.stiffness + mesh.mass;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(shifted);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("fem_spectrum: factorization failed");

  const int q = std::min(n, count + 8);
  std::mt19937 rng(91521);  // fixed seed: results must be deterministic
  std::normal_distribution<double> dist;
  Eigen::MatrixXd x(n, q);
  for (int j = 0; j < q; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = dist(rng);

  Eigen::VectorXd ritz_old = Eigen::VectorXd::Constant(q, -1.0);
  Eigen::MatrixXd y(n, q);
  Eigen::VectorXd ritz(q);
  for (int iter = 0; iter < 300; ++iter) {
    y = solver.solve(mesh.mass * x);
    // M-orthonormalize via Cholesky of the Gram matrix.
    Eigen::MatrixXd gram = y.transpose() * (mesh.mass * y);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      // Restart the offending subspace with fresh directions.
      for (int j = 0; j < q; ++j)
        for (int i = 0; i < n; ++i) y(i, j) = dist(rng);
      gram = y.transpose() * (mesh.mass * y);
      llt.compute(gram);
      if (llt.info() != Eigen::Success)
        throw std::runtime_error("fem_spectrum: orthonormalization failed");
    }
    y = llt.matrixU().solve<Eigen::OnTheRight>(y);
    Eigen::MatrixXd kp = y.transpose() * (mesh.stiffness * y);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(kp);
    ritz = eig.eigenvalues();
    x = y * eig.eigenvectors();
    double delta = 0.0;
    for (int j = 0; j < std::min(count, q); ++j)
      delta = std::max(delta, std::abs(ritz(j) - ritz_old(j)) / std::max(1.0, std::abs(ritz(j))));
    ritz_old = ritz;
    if (delta < 1e-10 && iter >= 3) break;
  }

  std::vector<double> out;
  for (int j = 0; j < std::min(count, q); ++j) out.push_back(std::max(ritz(j), 0.0));
  return out;
}

}  // namespace qgraph
