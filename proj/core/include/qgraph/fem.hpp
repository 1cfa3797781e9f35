#pragma once

#include <vector>

#include "qgraph/graph.hpp"

namespace qgraph {

// Independent reference solver: piecewise-linear finite elements on each
// edge, one shared unknown per Kirchhoff vertex, Dirichlet vertices
// eliminated. Returns the `count` smallest eigenvalues of the generalized
// problem K x = lambda M x (including lambda = 0 modes when present).
// Eigenvalue error is O(h^2). Requires h <= (min edge length) / 4,
// count <= 20, and at most 40 edges; intended as a cross-check at desk scale,
// not a production solver.
std::vector<double> fem_spectrum(const MetricGraph& g, double h, int count);

}  // namespace qgraph
