#pragma once

#include <functional>
#include <string_view>

#include "vortexemf/field.hpp"
#include "vortexemf/geometry.hpp"
#include "vortexemf/topology.hpp"
#include "vortexemf/units.hpp"

namespace vemf {

/// Rigid translation of a loop: C(t) = base + drift * t.
struct MovingLoop {
  PolyLoop base;
  Vec2 drift{};

  PolyLoop at(double t) const { return base.translated(drift * t); }
};

/// Out-of-plane magnetic field B_z(r, t) from a closed set of analytic
/// families, with its exact time derivative.
class TimeDependentB {
 public:
  enum class Family { uniform, linear_x, linear_t, sinusoidal };

  /// B = b0
  static TimeDependentB uniform(double b0);
  /// B = b0 + gamma x
  static TimeDependentB linear_x(double gamma, double b0 = 0.0);
  /// B = b0 + beta t
  static TimeDependentB linear_t(double beta, double b0 = 0.0);
  /// B = amplitude sin(kx x + ky y - omega t + phase)
  static TimeDependentB sinusoidal(double amplitude, double kx, double ky, double omega, double phase = 0.0);

  Family family() const { return family_; }
  double operator()(Vec2 p, double t) const;
  double time_derivative(Vec2 p, double t) const;

 private:
  TimeDependentB(Family family, double a, double b, double c, double d, double e);

  Family family_;
  double p0_, p1_, p2_, p3_, p4_;
};

std::string_view to_string(TimeDependentB::Family family);
/// uniform | linear-x | linear-t | sinusoidal
TimeDependentB::Family parse_b_family(std::string_view name);

/// Oriented surface integral of f over the loop interior (sign follows the
/// loop orientation), adaptive degree-5 triangle rule on an ear-clipped
/// triangulation. Throws QuadratureFailure past max_depth refinements.
double surface_integral(const std::function<double(Vec2)>& f, const PolyLoop& loop, double tol,
                        int max_depth = 20);

/// -[Phi(t + dt) - Phi(t)] / dt with Phi the flux of B_z through C(t).
double faraday_emf_total(const TimeDependentB& b, const MovingLoop& loop, double t, double dt,
                         double tol = 1e-13);

struct ExtrapolatedEmf {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// dt -> 0 limit of faraday_emf_total by Richardson extrapolation over
/// dt0, dt0/2, ..., dt0/2^(levels - 1).
ExtrapolatedEmf faraday_emf_limit(const TimeDependentB& b, const MovingLoop& loop, double t, double dt0,
                                  int levels = 5, double tol = 1e-13);

struct FaradayTerms {
  double induction = 0.0;  // -surface integral of dB/dt
  double lorentz = 0.0;    // closed integral of (v0 x B) . dr
  double total() const { return induction + lorentz; }
};

FaradayTerms faraday_emf_decomposed(const TimeDependentB& b, const MovingLoop& loop, double t,
                                    double tol = 1e-12);

/// Berry-connection EMF between two loop positions.
struct BerryEmf {
  double emf = 0.0;             // census value, in the active units
  double quadrature_emf = 0.0;  // same quantity from loop-integral quadrature (NaN if skipped)
  int winding_change = 0;       // W(C(t + dt)) - W(C(t))
  int merons_in = 0, merons_out = 0;
  int antimerons_in = 0, antimerons_out = 0;
};

/// E = -(hbar/e)(1/dt)[closed integral of A over C(t + dt) minus over C(t)].
/// The returned value comes from the exact census (-pi per unit winding);
/// when `verify` is set, both loop integrals are also computed by quadrature
/// and must agree with the census within 2 tol (QuadratureFailure otherwise).
/// A core within eps_core of either boundary throws AmbiguousEnclosure.
BerryEmf berry_emf_flux_rule(const VortexConfig& config, const MovingLoop& loop, double t, double dt,
                             const UnitSystem& units, double tol = 1e-8, bool verify = true);

/// Census and (optionally) the quadrature loop integral of the connection
/// for one loop position; lets a stepping driver reuse each position twice.
struct BerryLoopState {
  EnclosureCensus census;
  double integral = 0.0;  // NaN when quadrature is skipped
};
BerryLoopState berry_loop_state(const VortexConfig& config, const PolyLoop& loop, double tol, bool quadrature);
/// berry_emf_flux_rule from two precomputed positions.
BerryEmf berry_emf_between(const VortexConfig& config, const BerryLoopState& before, const BerryLoopState& after,
                           double dt, const UnitSystem& units, double tol);

/// E = -(hbar/e) closed integral of [dA/dt - v0 x (curl A)] . dr over the
/// step. dA/dt is a central time difference of the (static) connection; the
/// curl term counts the point fluxes swept by each edge during the step.
double berry_emf_line_form(const VortexConfig& config, const MovingLoop& loop, double t, double dt,
                           const UnitSystem& units, double tol = 1e-8);

}  // namespace vemf
