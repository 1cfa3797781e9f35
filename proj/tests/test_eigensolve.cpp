#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qgraph/decoration.hpp"
#include "qgraph/eigensolve.hpp"
#include "test_helpers.hpp"

using namespace qgraph;
using fixtures::kPi;

namespace {

std::vector<double> flatten(const SpectrumResult& s) {
  std::vector<double> out;
  for (const auto& e : s.entries)
    for (int i = 0; i < e.multiplicity; ++i) out.push_back(e.lambda);
  return out;
}

}  // namespace

TEST_CASE("clamped unit interval spectrum in (0.5, 50)") {
  const auto spec = scan_spectrum(fixtures::dirichlet_interval(), 0.5, 50.0);
  REQUIRE(spec.entries.size() == 2);
  CHECK(spec.entries[0].lambda == doctest::Approx(kPi * kPi).epsilon(1e-9));
  CHECK(spec.entries[0].multiplicity == 1);
  CHECK(spec.entries[1].lambda == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
  CHECK(spec.entries[1].multiplicity == 1);
  for (const auto& e : spec.entries) CHECK(e.residual <= 1e-8);
}

TEST_CASE("loop spectrum carries double eigenvalues") {
  const auto spec = scan_spectrum(fixtures::loop(), 0.5, 50.0);
  REQUIRE(spec.entries.size() == 1);
  CHECK(spec.entries[0].lambda == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
  CHECK(spec.entries[0].multiplicity == 2);
}

TEST_CASE("two-edge star equals an interval of doubled length") {
  const auto spec = scan_spectrum(fixtures::star2(), 0.5, 12.0);
  REQUIRE(spec.entries.size() == 2);
  CHECK(spec.entries[0].lambda == doctest::Approx(kPi * kPi / 4).epsilon(1e-9));
  CHECK(spec.entries[1].lambda == doctest::Approx(kPi * kPi).epsilon(1e-9));
}

TEST_CASE("resonator clamped at its boundary has the sine mode") {
  Decoration dec = make_spider(4, 1.0, 3);
  MetricGraph g = dec.graph;
  for (const auto& b : dec.boundary) g.vertices[b] = VertexCondition::dirichlet;
  const auto spec = scan_spectrum(g, 0.5, 15.0);
  bool found = false;
  for (const auto& e : spec.entries)
    if (std::abs(e.lambda - kPi * kPi) < 1e-6) found = true;
  CHECK(found);
}

TEST_CASE("window edges are half open: included at the bottom, excluded at the top") {
  const auto g = fixtures::dirichlet_interval();
  const double pi2 = kPi * kPi;
  const auto bottom = scan_spectrum(g, pi2, 20.0);
  REQUIRE(bottom.entries.size() == 1);
  CHECK(bottom.entries[0].lambda == doctest::Approx(pi2).epsilon(1e-9));
  const auto top = scan_spectrum(g, 0.5, pi2);
  CHECK(top.entries.empty());
}

TEST_CASE("overlapping windows agree on the overlap") {
  const auto g = fixtures::k5();
  const auto a = scan_spectrum(g, 2.0, 12.0);
  const auto b = scan_spectrum(g, 5.0, 20.0);
  for (const auto& ea : a.entries) {
    if (ea.lambda < 5.0) continue;
    bool matched = false;
    for (const auto& eb : b.entries)
      if (std::abs(ea.lambda - eb.lambda) < 1e-9 * std::max(1.0, ea.lambda) &&
          ea.multiplicity == eb.multiplicity)
        matched = true;
    CAPTURE(ea.lambda);
    CHECK(matched);
  }
}

TEST_CASE("doubling the grid density does not change multiplicities") {
  ScanOptions fine;
  fine.grid_step_factor = 8.0;
  for (const MetricGraph& g : {fixtures::loop(), fixtures::star2(), fixtures::cycle(3, 1.0)}) {
    const auto coarse_spec = scan_spectrum(g, 0.5, 30.0);
    const auto fine_spec = scan_spectrum(g, 0.5, 30.0, fine);
    REQUIRE(coarse_spec.entries.size() == fine_spec.entries.size());
    for (std::size_t i = 0; i < coarse_spec.entries.size(); ++i)
      CHECK(coarse_spec.entries[i].multiplicity == fine_spec.entries[i].multiplicity);
  }
}

TEST_CASE("roots are isolated: sigma_min rises between consecutive eigenvalues") {
  const auto g = fixtures::cycle(3, 1.0);
  const auto spec = scan_spectrum(g, 0.5, 30.0);
  REQUIRE(spec.entries.size() >= 2);
  for (const auto& e : spec.entries) CHECK(e.residual < 1e-8);
}

TEST_CASE("scan rejects bad windows and absurd grids") {
  const auto g = fixtures::loop();
  CHECK_THROWS_AS(scan_spectrum(g, 5.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(scan_spectrum(g, -1.0, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(scan_spectrum(g, 0.5, 1e14), std::invalid_argument);
  CHECK_THROWS_AS(scan_spectrum(fixtures::chain_lattice(), 0.5, 5.0),
                  std::invalid_argument);
}

TEST_CASE("eigenvalues near edge resonances are flagged") {
  // the clamped interval eigenvalue at pi^2 IS an edge resonance value
  const auto spec = scan_spectrum(fixtures::dirichlet_interval(), 0.5, 15.0);
  REQUIRE(spec.entries.size() == 1);
  CHECK(spec.entries[0].near_dirichlet_edge_value);
  // the loop eigenvalue 4 pi^2 equals (2 pi / 1)^2 = edge value for n = 2
  const auto loop_spec = scan_spectrum(fixtures::loop(), 0.5, 50.0);
  REQUIRE(loop_spec.entries.size() == 1);
  CHECK(loop_spec.entries[0].near_dirichlet_edge_value);
}

TEST_CASE("chain lattice Bloch spectrum follows the dispersion cos k = cos theta") {
  const auto g = fixtures::chain_lattice();
  SUBCASE("theta 0: only full periods, as a double band touching") {
    const auto spec = bloch_spectrum(g, {0.0}, 0.5, 45.0);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].lambda == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
    CHECK(spec.entries[0].multiplicity == 2);
  }
  SUBCASE("theta pi/2") {
    const auto spec = bloch_spectrum(g, {kPi / 2}, 0.5, 10.0);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].lambda == doctest::Approx(kPi * kPi / 4).epsilon(1e-9));
    CHECK(spec.entries[0].multiplicity == 1);
  }
  SUBCASE("theta pi: band crossing at odd multiples") {
    const auto spec = bloch_spectrum(g, {kPi}, 0.5, 45.0);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].lambda == doctest::Approx(kPi * kPi).epsilon(1e-9));
    CHECK(spec.entries[0].multiplicity == 2);
  }
  SUBCASE("generic theta against the dispersion oracle") {
    const double theta = 1.234;
    const auto spec = bloch_spectrum(g, {theta}, 0.5, 45.0);
    // roots of cos k = cos theta with k*k inside the window
    const std::vector<double> ks = {theta, 2 * kPi - theta};
    REQUIRE(spec.entries.size() == ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
      CHECK(spec.entries[i].lambda == doctest::Approx(ks[i] * ks[i]).epsilon(1e-9));
      CHECK(spec.entries[i].multiplicity == 1);
    }
  }
}

TEST_CASE("Bloch spectra are periodic in theta") {
  const auto g = fixtures::chain_lattice();
  const auto a = bloch_spectrum(g, {0.0}, 0.5, 45.0);
  const auto b = bloch_spectrum(g, {2 * kPi - 1e-15}, 0.5, 45.0);
  const auto fa = flatten(a), fb = flatten(b);
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i)
    CHECK(fa[i] == doctest::Approx(fb[i]).epsilon(1e-9));
}

TEST_CASE("square lattice Bloch eigenvalues at hand-solved quasimomenta") {
  const auto g = fixtures::square_lattice();
  SUBCASE("theta (0,0): full periods with one continuity constraint") {
    const auto spec = bloch_spectrum(g, {0.0, 0.0}, 35.0, 45.0);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].lambda == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
    CHECK(spec.entries[0].multiplicity == 3);
  }
  SUBCASE("theta (pi,pi): odd crossings") {
    const auto spec = bloch_spectrum(g, {kPi, kPi}, 85.0, 92.0);
    REQUIRE(spec.entries.size() == 1);
    CHECK(spec.entries[0].lambda == doctest::Approx(9 * kPi * kPi).epsilon(1e-9));
    CHECK(spec.entries[0].multiplicity == 3);
  }
}

TEST_CASE("zero eigenvalue multiplicity is analytic") {
  CHECK(zero_eigenvalue_multiplicity(fixtures::loop()) == 1);
  CHECK(zero_eigenvalue_multiplicity(fixtures::dirichlet_interval()) == 0);
  MetricGraph two;
  two.vertices["a"] = VertexCondition::kirchhoff;
  two.vertices["b"] = VertexCondition::kirchhoff;
  two.vertices["c"] = VertexCondition::kirchhoff;
  two.vertices["d"] = VertexCondition::dirichlet;
  two.edges.push_back({"e1", "a", "b", 1.0, {}});
  two.edges.push_back({"e2", "c", "d", 1.0, {}});
  CHECK(zero_eigenvalue_multiplicity(two) == 1);
}

TEST_CASE("counting function stays near the length law") {
  const auto g = fixtures::dirichlet_interval();
  const auto spec = scan_spectrum(g, 0.5, 50.0);
  const auto rep = weyl_check(spec, g);
  CHECK(rep.max_deviation <= 1.0 + 1e-9);
  CHECK_FALSE(rep.suspicious);

  const auto loop_spec = scan_spectrum(fixtures::loop(), 0.5, 50.0);
  const auto loop_rep = weyl_check(loop_spec, fixtures::loop());
  CHECK(loop_rep.max_deviation <= 2.0 + 1e-9);
  CHECK_FALSE(loop_rep.suspicious);
}
