#include <doctest.h>

#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "vortexemf/errors.hpp"
#include "vortexemf/nernst.hpp"

using namespace vemf;
using namespace vemf::testing;

namespace {

NernstScenario small(double n_m, double n_a, std::uint64_t seed = 1) {
  NernstScenario s;
  s.n_m = n_m;
  s.n_a = n_a;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("scenario defaults and validation") {
  const NernstScenario s = small(1.0, 2.0);
  CHECK(s.step() == doctest::Approx(1.0 / 80.0));
  CHECK(s.steps() == 64);
  CHECK(s.width() == 1.0);
  CHECK_NOTHROW(s.validate());
  auto bad = s;
  bad.v0 = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.n_m = -1.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.n_steps = 81;  // sweep 1.0125 > width
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.n_m = 1e6;
  CHECK_THROWS_AS(bad.validate(), ScenarioTooLarge);
  bad = s;
  bad.realizations = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("gas sampler") {
  CHECK(sample_vortex_gas(small(0.0, 0.0), 0).empty());
  // n_m Lx Ly = 100: mean over 1000 draws within 3 sigma = 9.5 of 100.
  const NernstScenario s = small(1.0, 0.5, 99);
  double total_m = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const VortexConfig g = sample_vortex_gas(s, i);
    int m = 0;
    for (const Core& c : g.cores()) {
      CHECK((c.winding == 1 || c.winding == -1));
      m += c.winding == 1;
    }
    total_m += m;
  }
  CHECK(std::abs(total_m / 1000.0 - 100.0) < 9.5);
  // Deterministic given the seed and index; different across indices.
  CHECK(sample_vortex_gas(s, 7).cores().size() == sample_vortex_gas(s, 7).cores().size());
  CHECK(sample_vortex_gas(s, 7).cores()[0].position == sample_vortex_gas(s, 7).cores()[0].position);
  CHECK(!(sample_vortex_gas(s, 7).cores()[0].position == sample_vortex_gas(s, 8).cores()[0].position));
  NernstScenario huge = s;
  huge.n_m = 2e5;
  CHECK_THROWS_AS(sample_vortex_gas(huge, 0), ScenarioTooLarge);
}

TEST_CASE("events are quantized and crossing counts add up") {
  const NernstScenario s = small(1.0, 2.0, 5);
  const NernstRealization r = run_nernst_realization(s, 0);
  REQUIRE(r.emf.size() == 64);
  double sum = 0.0;
  int net = 0;
  for (std::size_t k = 0; k < r.emf.size(); ++k) {
    CHECK(std::abs(r.emf[k] * r.dt / kPi - r.winding_change[k]) < 1e-12);
    sum += r.emf[k];
    net += r.winding_change[k];
  }
  CHECK(r.e_y == doctest::Approx(sum / 64 / s.ly));
  CHECK(net == r.merons_in - r.merons_out - r.antimerons_in + r.antimerons_out);
  // Only the trailing edge sweeps cores, and only outwards.
  CHECK(r.merons_in == 0);
  CHECK(r.antimerons_in == 0);
  CHECK(r.merons_out + r.antimerons_out > 0);
}

TEST_CASE("single species: every event has the same sign") {
  NernstScenario s = small(0.0, 3.0, 11);
  s.dt = 1.0 / 120.0;
  for (std::uint64_t i = 0; i < 5; ++i) {
    const NernstRealization r = run_nernst_realization(s, i);
    for (double e : r.emf) CHECK(e >= 0.0);
    CHECK(r.e_y > 0.0);
  }
}

TEST_CASE("sign law: mirrored labels negate every realization exactly") {
  const NernstScenario s = small(1.0, 2.0, 21);
  NernstScenario swapped = s;
  std::swap(swapped.n_m, swapped.n_a);
  for (std::uint64_t i = 0; i < 5; ++i) {
    const VortexConfig gas = sample_vortex_gas(s, i);
    const NernstRealization a = run_nernst_on_gas(s, gas, i);
    const NernstRealization b = run_nernst_on_gas(swapped, gas.with_flipped_windings(), i);
    CHECK(b.e_y == -a.e_y);
    for (std::size_t k = 0; k < a.emf.size(); ++k) CHECK(b.emf[k] == -a.emf[k]);
  }
}

TEST_CASE("ensemble statistics") {
  NernstScenario s = small(1.0, 2.0, 2024);
  s.realizations = 60;
  s.verify_quadrature = false;
  const NernstResult r = run_nernst(s);
  const NernstSignal sig = nernst_signal(r, s);
  CHECK(sig.predicted_e_y == doctest::Approx(kPi));
  CHECK(std::abs(r.e_y_mean - kPi) < 3.0 * r.e_y_stderr);
  CHECK(r.retries == 0);

  SUBCASE("swapped densities flip the mean") {
    NernstScenario sw = s;
    std::swap(sw.n_m, sw.n_a);
    const NernstResult q = run_nernst(sw);
    CHECK(std::abs(q.e_y_mean + kPi) < 3.0 * q.e_y_stderr);
  }
  SUBCASE("drift scaling: doubling v0 doubles E_y") {
    NernstScenario fast = s;
    fast.v0 = 2.0;
    const NernstResult q = run_nernst(fast);
    const double ratio = q.e_y_mean / r.e_y_mean;
    const double sigma = ratio * std::hypot(q.e_y_stderr / q.e_y_mean, r.e_y_stderr / r.e_y_mean);
    CHECK(std::abs(ratio - 2.0) < 3.0 * sigma);
  }
  SUBCASE("width independence") {
    NernstScenario narrow = s;
    narrow.loop_width = s.lx / 20.0;
    const NernstResult q = run_nernst(narrow);
    CHECK(std::abs(q.e_y_mean - kPi) < 3.0 * q.e_y_stderr);
  }
  SUBCASE("symmetric gas averages to zero") {
    NernstScenario sym = s;
    sym.n_a = 1.0;
    const NernstResult q = run_nernst(sym);
    CHECK(std::abs(q.e_y_mean) < 3.0 * q.e_y_stderr);
  }
}

TEST_CASE("worker count does not change the result") {
  NernstScenario s = small(1.0, 2.0, 3);
  s.realizations = 6;
  s.verify_quadrature = false;
  const NernstResult one = run_nernst(s);
  s.workers = 3;
  const NernstResult three = run_nernst(s);
  CHECK(one.e_y_mean == three.e_y_mean);
  CHECK(one.e_y_stderr == three.e_y_stderr);
  std::ostringstream a, b;
  write_nernst_trace_csv(a, one);
  write_nernst_trace_csv(b, three);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("realization,step,t,emf,winding_change\n", 0) == 0);
}

TEST_CASE("Nernst signal") {
  NernstScenario s = small(1.0, 2.0);
  NernstResult r;
  r.e_y_mean = 0.0;
  CHECK(nernst_signal(r, s).measured == 0.0);
  CHECK(nernst_signal(r, s).predicted == doctest::Approx(kPi));
  r.e_y_mean = 3.0;
  const double base = nernst_signal(r, s).measured;
  s.temperature_gradient = 2.0;
  CHECK(nernst_signal(r, s).measured == doctest::Approx(base / 2.0));
  s.temperature_gradient = 0.0;
  CHECK_THROWS_AS(nernst_signal(r, s), InvalidGradient);
  s.temperature_gradient = 1.0;
  s.units = UnitMode::si;
  const UnitSystem si = UnitSystem::si();
  CHECK(nernst_signal(r, s).predicted == doctest::Approx(si.h() / (2.0 * si.e)));
}

TEST_CASE("a core on a step line triggers one retry with a perturbed dt") {
  const NernstScenario s = small(1.0, 2.0);
  const Domain box{s.lx, s.ly};
  // Trailing edge sits at x = 9 + k / 80 after k steps.
  const VortexConfig once(box, {{{9.0 + 10.0 / 80.0, 5.0}, -1}});
  const NernstRealization r = run_nernst_on_gas(s, once);
  CHECK(r.retried);
  CHECK(r.dt == doctest::Approx(s.step() * (1.0 + kRetryPerturbation)));
  CHECK(r.antimerons_out == 1);
  // A second core on a line of the perturbed sweep exhausts the retry.
  const double dt2 = s.step() * (1.0 + kRetryPerturbation);
  const VortexConfig twice(box, {{{9.0 + 10.0 / 80.0, 5.0}, -1}, {{9.0 + 20.0 * dt2, 3.0}, 1}});
  CHECK_THROWS_AS(run_nernst_on_gas(s, twice), AmbiguousEnclosure);
}
