#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "qgraph/eigensolve.hpp"
#include "qgraph/fem.hpp"
#include "test_helpers.hpp"

using namespace qgraph;
using fixtures::kPi;

TEST_CASE("mesh oracle reproduces the clamped interval eigenvalues") {
  const auto vals = fem_spectrum(fixtures::dirichlet_interval(), 1e-3, 2);
  REQUIRE(vals.size() == 2);
  CHECK(std::abs(vals[0] - kPi * kPi) / (kPi * kPi) < 1e-4);
  CHECK(std::abs(vals[1] - 4 * kPi * kPi) / (4 * kPi * kPi) < 1e-4);
}

TEST_CASE("mesh oracle sees the loop eigenvalue twice") {
  const auto vals = fem_spectrum(fixtures::loop(), 1e-3, 3);
  REQUIRE(vals.size() == 3);
  // first value is the zero mode of the free loop
  CHECK(std::abs(vals[0]) < 1e-6);
  CHECK(std::abs(vals[1] - 4 * kPi * kPi) / (4 * kPi * kPi) < 1e-4);
  CHECK(std::abs(vals[2] - 4 * kPi * kPi) / (4 * kPi * kPi) < 1e-4);
  CHECK(std::abs(vals[1] - vals[2]) / (4 * kPi * kPi) < 1e-4);
}

TEST_CASE("mesh refinement shrinks the defect quadratically") {
  const auto g = fixtures::star2();
  const double exact = kPi * kPi / 4;
  const double coarse = std::abs(fem_spectrum(g, 4e-3, 1)[0] - exact);
  const double fine = std::abs(fem_spectrum(g, 2e-3, 1)[0] - exact);
  REQUIRE(fine > 0.0);
  const double factor = coarse / fine;
  CHECK(factor > 3.0);
  CHECK(factor < 5.0);
}

TEST_CASE("mesh count matches the scan count on a simple spectrum") {
  // star2 has eigenvalues (n pi / 2)^2, all simple; the linear-element values
  // overshoot slightly, so the scan window capped just above fem.back()
  // contains exactly the same number of eigenvalues
  const auto g = fixtures::star2();
  const auto fem = fem_spectrum(g, 1e-3, 8);
  const auto spec = scan_spectrum(g, 1e-3, fem.back() * 1.000001, ScanOptions{});
  int scan_count = 0;
  for (const auto& e : spec.entries) scan_count += e.multiplicity;
  CHECK(zero_eigenvalue_multiplicity(g) == 0);
  CHECK(scan_count == static_cast<int>(fem.size()));
}

TEST_CASE("mesh oracle rejects bad requests") {
  const auto g = fixtures::dirichlet_interval();
  CHECK_THROWS_AS(fem_spectrum(g, 0.3, 2), std::invalid_argument);  // too coarse
  CHECK_THROWS_AS(fem_spectrum(g, 1e-3, 0), std::invalid_argument);
  CHECK_THROWS_AS(fem_spectrum(g, 1e-3, 21), std::invalid_argument);
  CHECK_THROWS_AS(fem_spectrum(fixtures::chain_lattice(), 1e-3, 2),
                  std::invalid_argument);
}
