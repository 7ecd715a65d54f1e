#include <doctest.h>

#include <random>

#include "test_support.hpp"
#include "vortexemf/errors.hpp"
#include "vortexemf/topology.hpp"

using namespace vemf;
using namespace vemf::testing;

namespace {

const Domain kBox{10.0, 10.0};
const Vec2 kO{5.0, 5.0};

PolyLoop unit_square_at(Vec2 center) {
  return PolyLoop::rectangle(center - Vec2{0.5, 0.5}, center + Vec2{0.5, 0.5});
}

}  // namespace

TEST_CASE("PolyLoop validation and geometry") {
  CHECK_THROWS_AS(PolyLoop({{0, 0}, {1, 0}}), ValidationError);
  CHECK_THROWS_AS(PolyLoop({{0, 0}, {1, 0}, {0, 0}}), ValidationError);
  CHECK_THROWS_AS(PolyLoop({{0, 0}, {1, 0}, {2, 0}}), ValidationError);  // collinear: zero area
  CHECK_THROWS_AS(PolyLoop({{0, 0}, {2, 2}, {2, 0}, {0, 2}}), ValidationError);
  const PolyLoop sq = PolyLoop::rectangle({0, 0}, {2, 1});
  CHECK(sq.signed_area() == 2.0);
  CHECK(sq.reversed().signed_area() == -2.0);
  CHECK(sq.translated({1, 1}).vertex(0) == Vec2{1, 1});
  CHECK(sq.contains({1, 0.5}));
  CHECK(!sq.contains({3, 0.5}));
  CHECK(sq.boundary_distance({1, 0.5}) == doctest::Approx(0.5));
  const PolyLoop concave({{0, 0}, {4, 0}, {4, 4}, {2, 1}, {0, 4}});
  double area = 0.0;
  for (const auto& t : concave.triangulate()) area += 0.5 * cross(t[1] - t[0], t[2] - t[0]);
  CHECK(area == doctest::Approx(concave.signed_area()));
  CHECK(concave.triangulate().size() == 3);
}

TEST_CASE("line_integral examples") {
  const double tol = 1e-10;
  CHECK(line_integral(VectorField2D::zero(), unit_square_at(kO), tol) == 0.0);
  const auto g = chi_gradient(VortexConfig(kBox, {{kO, 1}}));
  CHECK(std::abs(line_integral(g, unit_square_at(kO), tol) - 2 * kPi) < tol);
  CHECK(std::abs(line_integral(g, PolyLoop::rectangle({7, 7}, {8, 8}), tol)) < tol);
  // Constant field around any closed loop: zero.
  CHECK(std::abs(line_integral(VectorField2D::constant({0.3, -2}), unit_square_at({2, 2}), tol)) < 1e-13);
  // Linear field (-y, x) / 2 integrates to the enclosed area.
  const VectorField2D area_form([](Vec2 p) { return Vec2{-0.5 * p.y, 0.5 * p.x}; });
  const PolyLoop tri({{0, 0}, {3, 0}, {1, 2}});
  CHECK(line_integral(area_form, tri, tol) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("line_integral error paths") {
  const VortexConfig c(kBox, {{kO, 1}});
  const auto g = chi_gradient(c);
  const PolyLoop through = PolyLoop::rectangle({5.0, 4.0}, {6.0, 6.0});  // edge x = 5 hits the core
  CHECK_THROWS_AS(line_integral(g, through, 1e-8), SingularLoop);
  CHECK_THROWS_AS(line_integral(g, unit_square_at(kO), 0.0), ValidationError);
  QuadratureOptions starved{1e-14, 2, 1};
  CHECK_THROWS_AS(line_integral(g, unit_square_at(kO), starved), QuadratureFailure);
}

TEST_CASE("line_integral matches the exact subtended-angle oracle") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const PolyLoop loop = random_star_loop(rng, {5, 5}, 1.0, 4.0);
    const VortexConfig c = random_config_around(rng, kBox, loop, 20, 1e-3);
    const double numeric = line_integral(chi_gradient(c), loop, 1e-10);
    CHECK(std::abs(numeric - exact_chi_loop_integral(c, loop)) < 1e-9);
  }
}

TEST_CASE("winding_number census examples") {
  const PolyLoop loop = PolyLoop::rectangle({3, 3}, {7, 7});
  CHECK(winding_number(VortexConfig(kBox, {{kO, 1}}), loop) == 1);
  CHECK(winding_number(VortexConfig(kBox, {{{4, 4}, 1}, {{5, 5}, 1}, {{6, 6}, -1}}), loop) == 1);
  CHECK(winding_number(VortexConfig(kBox, {{{1, 1}, 1}, {{9, 9}, -1}}), loop) == 0);
  CHECK(winding_number(VortexConfig(kBox), loop) == 0);
  CHECK(winding_number(VortexConfig(kBox, {{kO, 3}}), loop) == 3);
  const auto census = enclosure_census(VortexConfig(kBox, {{{4, 4}, 1}, {{5, 5}, -1}, {{6, 6}, -1}, {{9, 9}, 1}}), loop);
  CHECK(census.merons == 1);
  CHECK(census.antimerons == 2);
  CHECK(census.inside == std::vector<std::uint8_t>{1, 1, 1, 0});
}

TEST_CASE("cores on the boundary are ambiguous, never guessed") {
  const PolyLoop loop = PolyLoop::rectangle({3, 3}, {7, 7});
  CHECK_THROWS_AS(winding_number(VortexConfig(kBox, {{{3.0, 5.0}, 1}}), loop), AmbiguousEnclosure);
  CHECK_THROWS_AS(winding_number(VortexConfig(kBox, {{{7.0 + 5e-6, 5.0}, 1}}), loop), AmbiguousEnclosure);
  CHECK_THROWS_AS(winding_number(VortexConfig(kBox, {{{3.0, 3.0}, -1}}), loop), AmbiguousEnclosure);
  CHECK(winding_number(VortexConfig(kBox, {{{7.0 + 2e-5, 5.0}, 1}}), loop) == 0);
  CHECK(winding_number(VortexConfig(kBox, {{{7.0 - 2e-5, 5.0}, 1}}), loop) == 1);
}

TEST_CASE("census agrees with an angle-sum point-in-polygon oracle") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const PolyLoop loop = random_star_loop(rng, {5, 5}, 0.5, 4.5, 4, 20);
    const VortexConfig c = random_config_around(rng, kBox, loop, 20, 1e-4);
    int expected = 0;
    for (const Core& core : c.cores()) expected += core.winding * angle_sum_winding(loop, core.position);
    CHECK(winding_number(c, loop) == expected);
  }
}

TEST_CASE("quadrature and census agree on random configs") {
  std::mt19937_64 rng(33);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const PolyLoop loop = random_star_loop(rng, {5, 5}, 0.5, 4.5);
    const VortexConfig c = random_config_around(rng, kBox, loop, 20, 1e-3);
    const QuantizationReport r = verify_winding(c, loop, 1e-10);
    worst = std::max(worst, std::abs(r.numeric_integral / (2 * kPi) - winding_number(c, loop)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("orientation, deformation and additivity") {
  std::mt19937_64 rng(34);
  const double tol = 1e-10;
  for (int trial = 0; trial < 30; ++trial) {
    const PolyLoop loop = random_star_loop(rng, {5, 5}, 1.0, 4.0);
    const VortexConfig c = random_config_around(rng, kBox, loop, 12, 1e-3);
    const auto g = chi_gradient(c);
    const double fwd = line_integral(g, loop, tol);
    const double rev = line_integral(g, loop.reversed(), tol);
    CHECK(std::abs(fwd + rev) < 2 * tol);
    CHECK(winding_number(c, loop.reversed()) == -winding_number(c, loop));
  }

  // Two different loops around the same core set.
  const VortexConfig c(kBox, {{{4.5, 5}, 1}, {{5.5, 5.2}, 1}, {{5, 4.4}, -1}, {{1, 1}, 1}});
  const auto g = chi_gradient(c);
  const double small = line_integral(g, PolyLoop::rectangle({4, 4}, {6, 6}), tol);
  const double wobbly = line_integral(g, PolyLoop({{3, 3.5}, {7, 3}, {6.5, 5}, {7.5, 7}, {4, 6.5}, {3.5, 5}}), tol);
  CHECK(std::abs(small - wobbly) < 2 * tol);
  CHECK(std::abs(small - 2 * kPi) < tol);

  // Partition of a rectangle into two sub-rectangles sharing an edge.
  std::bernoulli_distribution s(0.5);
  std::uniform_real_distribution<double> u(0.5, 9.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Core> cores;
    for (int k = 0; k < 15; ++k) {
      Vec2 p{u(rng), u(rng)};
      if (std::abs(p.x - 5.0) < 1e-3 || std::abs(p.x - 2.0) < 1e-3 || std::abs(p.x - 8.0) < 1e-3 ||
          std::abs(p.y - 2.0) < 1e-3 || std::abs(p.y - 8.0) < 1e-3) continue;
      cores.push_back({p, s(rng) ? 1 : -1});
    }
    const VortexConfig cfg(kBox, cores);
    const int whole = winding_number(cfg, PolyLoop::rectangle({2, 2}, {8, 8}));
    const int left = winding_number(cfg, PolyLoop::rectangle({2, 2}, {5, 8}));
    const int right = winding_number(cfg, PolyLoop::rectangle({5, 2}, {8, 8}));
    CHECK(whole == left + right);
  }
}

TEST_CASE("verify_quantization examples") {
  const double tol = 1e-10;
  const PolyLoop loop = PolyLoop::rectangle({3, 3}, {7, 7});
  SUBCASE("one meron: -pi") {
    const auto r = verify_quantization(VortexConfig(kBox, {{kO, 1}}), loop, tol);
    CHECK(std::abs(r.numeric_integral + kPi) < tol);
    CHECK(r.nearest_quantum == -1);
    CHECK(r.census_quantum == -1);
    CHECK(r.deviation < tol);
    CHECK(r.quantum_unit == kPi);
    CHECK(r.deviation == std::abs(r.numeric_integral - r.nearest_quantum * r.quantum_unit));
  }
  SUBCASE("empty") {
    const auto r = verify_quantization(VortexConfig(kBox), loop, tol);
    CHECK(r.numeric_integral == 0.0);
    CHECK(r.nearest_quantum == 0);
  }
  SUBCASE("meron-antimeron pair cancels") {
    const VortexConfig c(kBox, {{{4, 4.5}, 1}, {{6, 5.5}, -1}});
    const auto r = verify_quantization(c, loop, tol);
    CHECK(std::abs(r.numeric_integral) < tol);
    CHECK(r.nearest_quantum == 0);
    CHECK(r.consistent());
    // Quadrature oracle: -1/2 of the exact angle sum.
    CHECK(std::abs(r.numeric_integral + 0.5 * exact_chi_loop_integral(c, loop)) < tol);
  }
}
