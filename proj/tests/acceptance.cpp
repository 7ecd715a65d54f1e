// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <unistd.h>

#include <json.hpp>

#include "test_support.hpp"
#include "vortexemf/cli.hpp"
#include "vortexemf/emf.hpp"
#include "vortexemf/manybody.hpp"
#include "vortexemf/manybody_cases.hpp"
#include "vortexemf/nernst.hpp"
#include "vortexemf/topology.hpp"

using namespace vemf;
using namespace vemf::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("[%s] criterion %d: %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string num(double x, const char* f = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Criteria 1 and 2 share one suite of 1000 random (config, loop) pairs.
void quantization_suite() {
  const Domain domain{10.0, 10.0};
  std::mt19937_64 rng(0x51A7E);
  std::uniform_real_distribution<double> uc(3.0, 7.0);
  std::bernoulli_distribution flip(0.5);
  double max_winding_dev = 0.0, max_flux_dev = 0.0;
  int nonzero = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    PolyLoop loop = random_star_loop(rng, {uc(rng), uc(rng)}, 0.3, 2.8, 3, 14);
    if (flip(rng)) loop = loop.reversed();
    const VortexConfig config = random_config_around(rng, domain, loop, 20, 1e-3);
    const QuantizationReport w = verify_winding(config, loop, 1e-10);
    max_winding_dev = std::max(max_winding_dev, std::abs(w.numeric_integral / (2.0 * kPi) - w.census_quantum));
    nonzero += w.census_quantum != 0;
  }
  const double t_winding = seconds_since(t0);
  report(1, max_winding_dev < 1e-8 && t_winding < 60.0 && nonzero > 100, "winding quantization",
         "1000 pairs (" + std::to_string(nonzero) + " nonzero), max |quadrature - census| = " + num(max_winding_dev) +
             " (< 1e-8), " + num(t_winding, "%.2f") + " s (< 60 s)");

  rng.seed(0x51A7E);  // same suite
  for (int trial = 0; trial < 1000; ++trial) {
    PolyLoop loop = random_star_loop(rng, {uc(rng), uc(rng)}, 0.3, 2.8, 3, 14);
    if (flip(rng)) loop = loop.reversed();
    const VortexConfig config = random_config_around(rng, domain, loop, 20, 1e-3);
    const QuantizationReport q = verify_quantization(config, loop, 1e-10);
    const int enclosed = winding_number(config, loop);
    max_flux_dev = std::max(max_flux_dev, std::abs(q.numeric_integral + kPi * enclosed));
  }
  report(2, max_flux_dev < 1e-8, "flux quantization",
         "same 1000 pairs, max |closed integral of A + pi W| = " + num(max_flux_dev) + " (< 1e-8)");
}

void manybody_criterion() {
  const auto t0 = Clock::now();
  const ConvergenceStudy pw = connection_convergence(ReferenceCase::plane_wave);
  const ConvergenceStudy vx = connection_convergence(ReferenceCase::vortex_phase);
  bool ok = true;
  std::string ratios;
  for (const auto* st : {&pw, &vx}) {
    for (double r : st->ratios()) {
      ok = ok && r >= 3.5 && r <= 4.5;
      ratios += num(r, "%.3f") + " ";
    }
  }
  const double c = vx.error_constant();
  auto chi = [](Vec2 p) { return 2.0 * std::atan2(p.y - kReferenceCore.y, p.x - kReferenceCore.x); };
  double worst = 0.0;  // residual / (C h^2)
  for (std::size_t n : {16u, 31u, 61u}) {
    const Grid g{n, n, 1.0 / static_cast<double>(n - 1), {0.0, 0.0}};
    const auto r = factorization_check(vortex_phase_state(g, kReferenceCore, kReferenceVortexSigma), phase_samples(g, chi));
    worst = std::max(worst, r.residual / (c * g.h * g.h));
  }
  {
    const std::size_t n = kMaxGridTwoElectrons;
    const Grid g{n, n, 1.0 / static_cast<double>(n - 1), {0.0, 0.0}};
    const auto r = factorization_check(triplet_vortex_state(g, kReferenceCore, kReferenceVortexSigma), phase_samples(g, chi));
    worst = std::max(worst, r.residual / (c * g.h * g.h));
  }
  const double elapsed = seconds_since(t0);
  report(3, ok && worst < 1.0 && elapsed < 300.0, "many-body consistency",
         "error ratios [" + ratios + "] in [3.5, 4.5]; C = " + num(c) + "; max residual / (C h^2) = " + num(worst) +
             " (< 1); " + num(elapsed, "%.2f") + " s (< 300 s)");
}

void faraday_criterion() {
  bool ok = true;
  double worst_excess = -INFINITY;  // max over cases of |diff| - allowed
  std::mt19937_64 rng(0xFA7A);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int cases = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const MovingLoop loop{random_star_loop(rng, {u(rng), u(rng)}, 0.4, 1.2), {u(rng), u(rng)}};
    const double t = 0.5 * u(rng);
    const TimeDependentB fields[] = {
        TimeDependentB::linear_x(2.0 * u(rng), u(rng)), TimeDependentB::linear_t(2.0 * u(rng), u(rng)),
        TimeDependentB::sinusoidal(1.0 + 0.5 * u(rng), 2.0 * u(rng), 2.0 * u(rng), 3.0 * u(rng), u(rng))};
    for (const auto& b : fields) {
      const ExtrapolatedEmf lim = faraday_emf_limit(b, loop, t, 0.05);
      const FaradayTerms terms = faraday_emf_decomposed(b, loop, t);
      const double excess = std::abs(lim.value - terms.total()) - std::max(1e-8, lim.error_estimate);
      worst_excess = std::max(worst_excess, excess);
      ok = ok && excess <= 0.0;
      ++cases;
    }
  }
  // Closed forms on a W x L rectangle drifting along x.
  const double L = 1.7, W = 0.6, v0 = 0.8, beta = 1.3, gamma = -0.9;
  const MovingLoop rect{PolyLoop::rectangle({0.3, -0.2}, {0.3 + W, -0.2 + L}), {v0, 0.0}};
  const double e_beta = std::abs(faraday_emf_limit(TimeDependentB::linear_t(beta, 0.4), rect, 0.2, 0.05).value + beta * L * W);
  const double e_gamma =
      std::abs(faraday_emf_limit(TimeDependentB::linear_x(gamma, 0.4), rect, 0.2, 0.05).value + gamma * v0 * L * W);
  ok = ok && e_beta < 1e-8 && e_gamma < 1e-8;
  report(4, ok, "Faraday equivalence",
         std::to_string(cases) + " random cases over linear-x, linear-t, sinusoidal: max(|diff| - max(1e-8, extrap err)) = " +
             num(worst_excess) + " (<= 0); |E + beta S| = " + num(e_beta) + ", |E + gamma v0 L W| = " + num(e_gamma) +
             " (< 1e-8)");
}

void berry_engines_criterion() {
  const Domain domain{10.0, 10.0};
  std::mt19937_64 rng(0xBE77);
  std::uniform_real_distribution<double> u(-1.0, 1.0), ux(0.0, 10.0);
  std::bernoulli_distribution sign(0.5);
  const UnitSystem nat = UnitSystem::natural();
  double worst = 0.0, worst_quant = 0.0;
  int events = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const PolyLoop base = random_star_loop(rng, {5.0 + u(rng), 5.0 + u(rng)}, 0.8, 2.5);
    const MovingLoop loop{base, {1.5 * u(rng), 1.5 * u(rng)}};
    const double dt = 0.2 + 0.3 * (u(rng) + 1.0);
    const PolyLoop after = loop.at(dt);
    std::vector<Core> cores;
    const int n = 5 + static_cast<int>(20 * (u(rng) + 1.0));
    while (static_cast<int>(cores.size()) < n) {
      const Vec2 p{ux(rng), ux(rng)};
      if (!domain.contains_strictly(p) || base.boundary_distance(p) < 1e-4 || after.boundary_distance(p) < 1e-4) continue;
      cores.push_back({p, sign(rng) ? 1 : -1});
    }
    const VortexConfig config(domain, cores);
    const BerryEmf flux = berry_emf_flux_rule(config, loop, 0.0, dt, nat);
    const double line = berry_emf_line_form(config, loop, 0.0, dt, nat);
    worst = std::max({worst, std::abs(flux.emf - line), std::abs(flux.quadrature_emf - line)});
    // The census count is an exact integer; the EMF must equal it in units
    // of pi hbar / (e dt) up to round-off.
    worst_quant = std::max(worst_quant, std::abs(flux.emf * dt / kPi - flux.winding_change));
    events += flux.winding_change != 0;
  }
  report(5, worst < 1e-6 && worst_quant < 1e-12 && events > 20, "Berry EMF engine cross-check",
         "100 sweeps (" + std::to_string(events) + " with events): max |flux form - line form| = " + num(worst) +
             " (< 1e-6); max |E dt e / (pi hbar) - integer census| = " + num(worst_quant) + " (< 1e-12)");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Criteria 6 and 7 run through the same pipeline as the command line.
void nernst_criteria() {
  const fs::path dir = fs::temp_directory_path() / ("vortexemf_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto run = [&](const std::string& name, double n_m, double n_a, const fs::path& out) {
    std::istringstream text("command = nernst\nseed = 20261019\nworkers = 1\n[nernst]\nlx = 10\nly = 10\nn_m = " +
                            num(n_m, "%.17g") + "\nn_a = " + num(n_a, "%.17g") +
                            "\nv0 = 1\nrealizations = 200\nverify_quadrature = true\n");
    const ConfigFile cfg = ConfigFile::parse(text, name);
    cli::Overrides o;
    o.out = out.string();
    const auto t0 = Clock::now();
    cli::run_scenario(cfg, "", o);
    return seconds_since(t0);
  };

  const double t_main = run("default", 1.0, 2.0, dir / "run1");
  const double t_sym = run("symmetric", 1.5, 1.5, dir / "sym");
  const auto j = nlohmann::json::parse(slurp(dir / "run1" / "nernst_summary.json"));
  const auto js = nlohmann::json::parse(slurp(dir / "sym" / "nernst_summary.json"));
  const double mean = j["e_y_mean"], se = j["e_y_stderr"], pred = j["e_y_predicted"];
  const double smean = js["e_y_mean"], sse = js["e_y_stderr"];
  const bool unbiased = std::abs(mean - pred) < 3.0 * se;
  const bool precise = se < 0.1 * std::abs(pred);
  const bool symmetric = std::abs(smean) < 3.0 * sse;
  const bool fast = t_main < 600.0 && t_sym < 600.0;
  report(6, unbiased && precise && symmetric && fast && std::abs(pred - kPi) < 1e-15, "Nernst reproduction",
         "200 realizations: E_y = " + num(mean, "%.4f") + " +- " + num(se, "%.4f") + " vs h v0 (n_a - n_m) / 2e = " +
             num(pred, "%.4f") + " (" + num((mean - pred) / se, "%.2f") + " stderr, < 3); relative stderr " +
             num(se / pred, "%.3f") + " (< 0.1); symmetric E_y = " + num(smean, "%.4f") + " +- " + num(sse, "%.4f") +
             " (" + num(smean / sse, "%.2f") + " stderr); " + num(t_main, "%.1f") + " s + " + num(t_sym, "%.1f") +
             " s (each < 600 s)");

  run("default", 1.0, 2.0, dir / "run2");
  const std::string a = slurp(dir / "run1" / "nernst_summary.json");
  const std::string b = slurp(dir / "run2" / "nernst_summary.json");
  report(7, !a.empty() && a == b, "determinism",
         "two seeded runs of criterion 6: summaries " + std::string(a == b ? "byte-identical" : "DIFFER") + " (" +
             std::to_string(a.size()) + " bytes)");
  fs::remove_all(dir);
}

template <class F>
void guarded(int id, const char* title, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, title, std::string("threw: ") + e.what());
  }
}

}  // namespace

int main() {
  guarded(1, "winding/flux quantization", quantization_suite);
  guarded(3, "many-body consistency", manybody_criterion);
  guarded(4, "Faraday equivalence", faraday_criterion);
  guarded(5, "Berry EMF engine cross-check", berry_engines_criterion);
  guarded(6, "Nernst reproduction and determinism", nernst_criteria);
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
