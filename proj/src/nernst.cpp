#include "vortexemf/nernst.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "parallel.hpp"
#include "vortexemf/errors.hpp"

namespace vemf {

namespace {

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, std::uint32_t species) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), species};
  return std::mt19937_64(seq);
}

}  // namespace

double NernstScenario::step() const {
  if (dt > 0.0) return dt;
  return 1.0 / (4.0 * std::max(n_m, n_a) * ly * v0);
}

int NernstScenario::steps() const {
  if (n_steps > 0) return n_steps;
  return static_cast<int>(std::floor(0.8 * width() / (v0 * step())));
}

void NernstScenario::validate() const {
  if (!(std::isfinite(lx) && lx > 0.0 && std::isfinite(ly) && ly > 0.0)) {
    throw ValidationError("domain sizes Lx, Ly must be positive");
  }
  if (!finite_nonneg(n_m) || !finite_nonneg(n_a)) throw ValidationError("densities n_m, n_a must be finite and >= 0");
  if (!(std::isfinite(v0) && v0 > 0.0)) throw ValidationError("drift speed v0 must be positive");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive (or 0 for the default)");
  if (dt == 0.0 && n_m == 0.0 && n_a == 0.0) throw ValidationError("dt has no default for an empty gas; set it");
  if (n_steps < 0) throw ValidationError("n_steps must be positive (or 0 for the default)");
  if (!(loop_width >= 0.0) || !std::isfinite(loop_width) || width() > lx) {
    throw ValidationError("loop width must lie in (0, Lx]");
  }
  if (steps() < 1) throw ValidationError("scenario has no steps: the loop width is below one drift step");
  const double sweep = v0 * step() * steps() * (1.0 + kRetryPerturbation);
  if (sweep > width()) {
    throw ValidationError("drift v0 * dt * n_steps (" + std::to_string(sweep) + ", with retry margin) exceeds the loop width " +
                          std::to_string(width()) + ": the trailing edge would leave the gas");
  }
  if (!std::isfinite(temperature_gradient)) throw ValidationError("temperature gradient must be finite");
  if (realizations < 1) throw ValidationError("realizations must be >= 1");
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (!(quadrature_tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  const double expected = (n_m + n_a) * lx * ly;
  if (expected > kMaxExpectedCores) {
    throw ScenarioTooLarge("expected core count " + std::to_string(expected) + " exceeds 1e7");
  }
}

MovingLoop NernstScenario::loop() const {
  return {PolyLoop::rectangle({lx - width(), 0.0}, {lx, ly}), {v0, 0.0}};
}

VortexConfig sample_vortex_gas(const NernstScenario& s, std::mt19937_64& meron_rng, std::mt19937_64& antimeron_rng) {
  if (!finite_nonneg(s.n_m) || !finite_nonneg(s.n_a)) throw ValidationError("densities must be finite and >= 0");
  const double area = s.lx * s.ly;
  if ((s.n_m + s.n_a) * area > kMaxExpectedCores) throw ScenarioTooLarge("expected core count exceeds 1e7");
  const Domain domain{s.lx, s.ly};
  const double eps = 1e-6 * std::min(s.lx, s.ly);
  // Trailing-edge positions of the planned sweep. A core within eps of one
  // of them is as ill-posed for the census as one on a y edge; redraw it.
  const double x0 = s.lx - s.width();
  const double stride = s.v0 * s.step();
  const int steps = s.steps();
  auto on_step_line = [&](double x) {
    const double k = std::round((x - x0) / stride);
    if (k < 0.0 || k > steps) return false;
    for (double kk : {k - 1.0, k, k + 1.0}) {
      if (std::abs(x - (x0 + kk * stride)) <= 2.0 * eps) return true;
    }
    return false;
  };
  std::vector<Core> cores;
  auto draw = [&](std::mt19937_64& rng, double density, int winding) {
    if (density == 0.0) return;
    const long count = std::poisson_distribution<long>(density * area)(rng);
    std::uniform_real_distribution<double> ux(0.0, s.lx), uy(0.0, s.ly);
    for (long k = 0; k < count;) {
      const Vec2 p{ux(rng), uy(rng)};
      if (p.x <= eps || p.x >= s.lx - eps || p.y <= eps || p.y >= s.ly - eps || on_step_line(p.x)) continue;
      cores.push_back({p, winding});
      ++k;
    }
  };
  draw(meron_rng, s.n_m, +1);
  draw(antimeron_rng, s.n_a, -1);
  return VortexConfig(domain, std::move(cores));
}

VortexConfig sample_vortex_gas(const NernstScenario& s, std::uint64_t index) {
  auto m = stream(s.seed, index, 1);
  auto a = stream(s.seed, index, 2);
  return sample_vortex_gas(s, m, a);
}

namespace {

NernstRealization sweep(const NernstScenario& s, const VortexConfig& gas, double dt) {
  const UnitSystem units = UnitSystem::from_mode(s.units);
  const MovingLoop loop = s.loop();
  const int n = s.steps();
  NernstRealization r;
  r.dt = dt;
  r.emf.reserve(n);
  r.winding_change.reserve(n);
  double sum = 0.0;
  // Same positions and arithmetic as berry_emf_flux_rule(gas, loop, k dt, dt),
  // with each position evaluated once.
  BerryLoopState before = berry_loop_state(gas, loop.at(0.0), s.quadrature_tol, s.verify_quadrature);
  for (int k = 0; k < n; ++k) {
    BerryLoopState after = berry_loop_state(gas, loop.at(k * dt + dt), s.quadrature_tol, s.verify_quadrature);
    const BerryEmf step = berry_emf_between(gas, before, after, dt, units, s.quadrature_tol);
    before = std::move(after);
    r.emf.push_back(step.emf);
    r.winding_change.push_back(step.winding_change);
    r.merons_in += step.merons_in;
    r.merons_out += step.merons_out;
    r.antimerons_in += step.antimerons_in;
    r.antimerons_out += step.antimerons_out;
    sum += step.emf;
  }
  r.e_y = sum / n / s.ly;
  return r;
}

}  // namespace

NernstRealization run_nernst_on_gas(const NernstScenario& s, const VortexConfig& gas, std::uint64_t index) {
  s.validate();
  NernstRealization r;
  try {
    r = sweep(s, gas, s.step());
  } catch (const AmbiguousEnclosure&) {
    r = sweep(s, gas, s.step() * (1.0 + kRetryPerturbation));
    r.retried = true;
  }
  r.index = index;
  for (const Core& c : gas.cores()) (c.winding > 0 ? r.merons : r.antimerons) += 1;
  return r;
}

NernstRealization run_nernst_realization(const NernstScenario& s, std::uint64_t index) {
  s.validate();
  return run_nernst_on_gas(s, sample_vortex_gas(s, index), index);
}

NernstResult run_nernst(const NernstScenario& s) {
  s.validate();
  NernstResult out;
  out.realizations.resize(static_cast<std::size_t>(s.realizations));
  detail::parallel_for(out.realizations.size(), s.workers,
                       [&](std::size_t i) { out.realizations[i] = run_nernst_realization(s, i); });
  // Fixed-order aggregation.
  const double n = static_cast<double>(out.realizations.size());
  double sum = 0.0;
  for (const auto& r : out.realizations) {
    sum += r.e_y;
    out.merons_swept += r.merons_out - r.merons_in;
    out.antimerons_swept += r.antimerons_out - r.antimerons_in;
    out.retries += r.retried ? 1 : 0;
  }
  out.e_y_mean = sum / n;
  if (out.realizations.size() > 1) {
    double ss = 0.0;
    for (const auto& r : out.realizations) ss += (r.e_y - out.e_y_mean) * (r.e_y - out.e_y_mean);
    out.e_y_stderr = std::sqrt(ss / (n - 1.0) / n);
  } else {
    out.e_y_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  const double grad = std::abs(s.temperature_gradient);
  out.e_n = grad > 0.0 ? out.e_y_mean / grad : std::numeric_limits<double>::quiet_NaN();
  return out;
}

NernstSignal nernst_signal(const NernstResult& result, const NernstScenario& s) {
  const double grad = std::abs(s.temperature_gradient);
  if (!(grad > 0.0) || !std::isfinite(grad)) {
    throw InvalidGradient("|dT/dx| must be positive and finite to form the Nernst signal");
  }
  const UnitSystem u = UnitSystem::from_mode(s.units);
  NernstSignal sig;
  sig.predicted_e_y = u.h() * s.v0 * (s.n_a - s.n_m) / (2.0 * u.e);
  sig.predicted = sig.predicted_e_y / grad;
  sig.measured = result.e_y_mean / grad;
  return sig;
}

void write_nernst_trace_csv(std::ostream& out, const NernstResult& result) {
  out << "realization,step,t,emf,winding_change\n";
  char buf[128];
  for (const auto& r : result.realizations) {
    for (std::size_t k = 0; k < r.emf.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%llu,%zu,%.17g,%.17g,%d\n", static_cast<unsigned long long>(r.index), k,
                    static_cast<double>(k) * r.dt, r.emf[k], r.winding_change[k]);
      out << buf;
    }
  }
}

}  // namespace vemf
