#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "vortexemf/emf.hpp"
#include "vortexemf/field.hpp"
#include "vortexemf/units.hpp"

namespace vemf {

/// Drifting-loop Monte Carlo over a static meron/antimeron gas.
///
/// The gas fills [0, Lx] x [0, Ly]. The loop spans the full height and has
/// width loop_width; it starts flush with the right edge of the gas,
/// [Lx - W, Lx], and drifts along +x. Its leading edge therefore runs in
/// empty space and only the trailing edge sweeps cores, which releases them
/// from the loop: a meron leaving contributes -pi/dt, an antimeron +pi/dt.
struct NernstScenario {
  double lx = 10.0;
  double ly = 10.0;
  double n_m = 1.0;  // areal density of w = +1 cores
  double n_a = 2.0;  // areal density of w = -1 cores
  double v0 = 1.0;
  double dt = 0.0;   // 0: 1 / (4 max(n_m, n_a) Ly v0)
  int n_steps = 0;   // 0: largest count with a sweep of at most 0.8 W
  double temperature_gradient = 1.0;
  std::uint64_t seed = 0;
  UnitMode units = UnitMode::natural;
  double loop_width = 0.0;  // 0: Lx / 10
  int realizations = 1;
  unsigned workers = 1;
  bool verify_quadrature = true;
  double quadrature_tol = 1e-8;

  double width() const { return loop_width > 0.0 ? loop_width : lx / 10.0; }
  double step() const;
  int steps() const;
  /// Throws ValidationError (or ScenarioTooLarge) on any violated invariant.
  void validate() const;
  /// Loop at t = 0 and its drift.
  MovingLoop loop() const;
};

inline constexpr double kMaxExpectedCores = 1e7;
/// Relative dt perturbation of the single retry after an ambiguous step.
inline constexpr double kRetryPerturbation = 1e-3;

/// Two independent homogeneous Poisson processes (w = +1 at n_m, w = -1 at
/// n_a), each from its own stream. Cores within eps_core of a domain edge
/// are redrawn.
VortexConfig sample_vortex_gas(const NernstScenario& scenario, std::mt19937_64& meron_rng,
                               std::mt19937_64& antimeron_rng);
/// The streams used for realization `index`.
VortexConfig sample_vortex_gas(const NernstScenario& scenario, std::uint64_t index);

struct NernstRealization {
  std::uint64_t index = 0;
  double dt = 0.0;                // step actually used
  bool retried = false;
  std::size_t merons = 0, antimerons = 0;
  std::vector<double> emf;        // per step, active units
  std::vector<int> winding_change;
  double e_y = 0.0;               // mean EMF / Ly
  int merons_in = 0, merons_out = 0;
  int antimerons_in = 0, antimerons_out = 0;
};

/// One realization on a given gas, with the one-shot dt retry.
NernstRealization run_nernst_on_gas(const NernstScenario& scenario, const VortexConfig& gas,
                                    std::uint64_t index = 0);
NernstRealization run_nernst_realization(const NernstScenario& scenario, std::uint64_t index);

struct NernstResult {
  std::vector<NernstRealization> realizations;
  double e_y_mean = 0.0;
  double e_y_stderr = 0.0;  // NaN for a single realization
  double e_n = 0.0;
  int merons_swept = 0;     // net out-minus-in counts over all realizations
  int antimerons_swept = 0;
  int retries = 0;
};

/// Runs scenario.realizations realizations on scenario.workers threads.
/// Each realization depends only on (seed, index), so the result does not
/// depend on the worker count.
NernstResult run_nernst(const NernstScenario& scenario);

struct NernstSignal {
  double measured = 0.0;   // E_y_mean / |dT/dx|
  double predicted = 0.0;  // h v0 (n_a - n_m) / (2 e |dT/dx|)
  double predicted_e_y = 0.0;
};

/// Throws InvalidGradient when |dT/dx| is zero or not finite.
NernstSignal nernst_signal(const NernstResult& result, const NernstScenario& scenario);

/// realization,step,t,emf,winding_change
void write_nernst_trace_csv(std::ostream& out, const NernstResult& result);

}  // namespace vemf
