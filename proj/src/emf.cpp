#include "vortexemf/emf.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "vortexemf/errors.hpp"
#include "vortexemf/topology.hpp"

namespace vemf {

TimeDependentB::TimeDependentB(Family family, double a, double b, double c, double d, double e)
    : family_(family), p0_(a), p1_(b), p2_(c), p3_(d), p4_(e) {
  for (double v : {a, b, c, d, e}) {
    if (!std::isfinite(v)) throw ValidationError("B-field parameters must be finite");
  }
}

TimeDependentB TimeDependentB::uniform(double b0) { return {Family::uniform, b0, 0, 0, 0, 0}; }
TimeDependentB TimeDependentB::linear_x(double gamma, double b0) { return {Family::linear_x, b0, gamma, 0, 0, 0}; }
TimeDependentB TimeDependentB::linear_t(double beta, double b0) { return {Family::linear_t, b0, beta, 0, 0, 0}; }
TimeDependentB TimeDependentB::sinusoidal(double amplitude, double kx, double ky, double omega, double phase) {
  return {Family::sinusoidal, amplitude, kx, ky, omega, phase};
}

double TimeDependentB::operator()(Vec2 p, double t) const {
  switch (family_) {
    case Family::uniform:
      return p0_;
    case Family::linear_x:
      return p0_ + p1_ * p.x;
    case Family::linear_t:
      return p0_ + p1_ * t;
    case Family::sinusoidal:
      return p0_ * std::sin(p1_ * p.x + p2_ * p.y - p3_ * t + p4_);
  }
  return 0.0;
}

double TimeDependentB::time_derivative(Vec2 p, double t) const {
  switch (family_) {
    case Family::uniform:
    case Family::linear_x:
      return 0.0;
    case Family::linear_t:
      return p1_;
    case Family::sinusoidal:
      return -p0_ * p3_ * std::cos(p1_ * p.x + p2_ * p.y - p3_ * t + p4_);
  }
  return 0.0;
}

std::string_view to_string(TimeDependentB::Family family) {
  switch (family) {
    case TimeDependentB::Family::uniform:
      return "uniform";
    case TimeDependentB::Family::linear_x:
      return "linear-x";
    case TimeDependentB::Family::linear_t:
      return "linear-t";
    case TimeDependentB::Family::sinusoidal:
      return "sinusoidal";
  }
  return "unknown";
}

TimeDependentB::Family parse_b_family(std::string_view name) {
  using F = TimeDependentB::Family;
  for (F f : {F::uniform, F::linear_x, F::linear_t, F::sinusoidal}) {
    if (name == to_string(f)) return f;
  }
  throw ValidationError("unknown B-field family '" + std::string(name) +
                        "' (expected uniform, linear-x, linear-t or sinusoidal)");
}

// ---------------------------------------------------------------------------
// Surface quadrature

namespace {

using Triangle = std::array<Vec2, 3>;

// Degree-5, 7-point symmetric rule on the reference triangle.
struct TriangleRule {
  std::array<std::array<double, 3>, 7> bary;
  std::array<double, 7> weight;
};

const TriangleRule& rule() {
  static const TriangleRule r = [] {
    const double s15 = std::sqrt(15.0);
    const double a = (6.0 - s15) / 21.0, b = (6.0 + s15) / 21.0;
    const double wa = (155.0 - s15) / 1200.0, wb = (155.0 + s15) / 1200.0;
    TriangleRule t{};
    t.bary = {{{1.0 / 3, 1.0 / 3, 1.0 / 3},
               {1 - 2 * a, a, a}, {a, 1 - 2 * a, a}, {a, a, 1 - 2 * a},
               {1 - 2 * b, b, b}, {b, 1 - 2 * b, b}, {b, b, 1 - 2 * b}}};
    t.weight = {9.0 / 40.0, wa, wa, wa, wb, wb, wb};
    return t;
  }();
  return r;
}

double triangle_estimate(const std::function<double(Vec2)>& f, const Triangle& tri) {
  const double area = 0.5 * std::abs(cross(tri[1] - tri[0], tri[2] - tri[0]));
  double sum = 0.0;
  const TriangleRule& r = rule();
  for (std::size_t k = 0; k < 7; ++k) {
    const auto& l = r.bary[k];
    sum += r.weight[k] * f(l[0] * tri[0] + l[1] * tri[1] + l[2] * tri[2]);
  }
  return area * sum;
}

double adaptive_triangle(const std::function<double(Vec2)>& f, const Triangle& tri, double whole,
                         double tol, int depth, int max_depth) {
  const Vec2 m01 = 0.5 * (tri[0] + tri[1]), m12 = 0.5 * (tri[1] + tri[2]), m20 = 0.5 * (tri[2] + tri[0]);
  const std::array<Triangle, 4> kids{{{tri[0], m01, m20}, {m01, tri[1], m12}, {m20, m12, tri[2]}, {m01, m12, m20}}};
  std::array<double, 4> part{};
  double refined = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    part[k] = triangle_estimate(f, kids[k]);
    refined += part[k];
  }
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                       (std::abs(part[0]) + std::abs(part[1]) + std::abs(part[2]) + std::abs(part[3]));
  if (std::abs(refined - whole) <= std::max(tol, noise)) return refined;
  if (depth + 1 >= max_depth) {
    throw QuadratureFailure("surface integral did not reach tolerance at depth " + std::to_string(max_depth));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < 4; ++k) total += adaptive_triangle(f, kids[k], part[k], 0.25 * tol, depth + 1, max_depth);
  return total;
}

}  // namespace

double surface_integral(const std::function<double(Vec2)>& f, const PolyLoop& loop, double tol, int max_depth) {
  if (!(tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  const auto triangles = loop.triangulate();
  const double tri_tol = tol / static_cast<double>(triangles.size());
  double total = 0.0;
  for (const Triangle& tri : triangles) {
    total += adaptive_triangle(f, tri, triangle_estimate(f, tri), tri_tol, 0, max_depth);
  }
  return loop.orientation() * total;
}

// ---------------------------------------------------------------------------
// Faraday

namespace {

double flux(const TimeDependentB& b, const MovingLoop& loop, double t, double tol) {
  return surface_integral([&](Vec2 p) { return b(p, t); }, loop.at(t), tol);
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
}

}  // namespace

double faraday_emf_total(const TimeDependentB& b, const MovingLoop& loop, double t, double dt, double tol) {
  check_dt(dt);
  return -(flux(b, loop, t + dt, tol) - flux(b, loop, t, tol)) / dt;
}

ExtrapolatedEmf faraday_emf_limit(const TimeDependentB& b, const MovingLoop& loop, double t, double dt0,
                                  int levels, double tol) {
  check_dt(dt0);
  if (levels < 2) throw ValidationError("extrapolation needs at least two levels");
  const double phi0 = flux(b, loop, t, tol);
  // table[k][j]: j-fold Richardson elimination of the O(dt^j) terms.
  std::vector<std::vector<double>> table(levels);
  double dt = dt0;
  for (int k = 0; k < levels; ++k, dt *= 0.5) {
    table[k].push_back(-(flux(b, loop, t + dt, tol) - phi0) / dt);
    double factor = 1.0;
    for (int j = 1; j <= k; ++j) {
      factor *= 2.0;
      table[k].push_back((factor * table[k][j - 1] - table[k - 1][j - 1]) / (factor - 1.0));
    }
  }
  const int n = levels - 1;
  ExtrapolatedEmf out;
  out.value = table[n][n];
  // Last elimination step plus the flux quadrature error amplified by 1/dt.
  const double dt_min = dt0 / std::pow(2.0, n);
  out.error_estimate = std::abs(table[n][n] - table[n][n - 1]) + std::pow(2.0, n) * 2.0 * tol / dt_min;
  return out;
}

FaradayTerms faraday_emf_decomposed(const TimeDependentB& b, const MovingLoop& loop, double t, double tol) {
  const PolyLoop c = loop.at(t);
  FaradayTerms out;
  out.induction = -surface_integral([&](Vec2 p) { return b.time_derivative(p, t); }, c, tol);
  const Vec2 v = loop.drift;
  // v x (B z) = (v_y B, -v_x B)
  const VectorField2D lorentz([&b, v, t](Vec2 p) {
    const double bz = b(p, t);
    return Vec2{v.y * bz, -v.x * bz};
  });
  out.lorentz = line_integral(lorentz, c, tol);
  return out;
}

// ---------------------------------------------------------------------------
// Berry-connection EMF

BerryLoopState berry_loop_state(const VortexConfig& config, const PolyLoop& loop, double tol, bool quadrature) {
  BerryLoopState st;
  st.census = enclosure_census(config, loop);
  st.integral = quadrature ? line_integral(berry_connection_field(config), loop, tol)
                           : std::numeric_limits<double>::quiet_NaN();
  return st;
}

BerryEmf berry_emf_between(const VortexConfig& config, const BerryLoopState& before, const BerryLoopState& after,
                           double dt, const UnitSystem& units, double tol) {
  check_dt(dt);
  BerryEmf out;
  out.winding_change = after.census.winding - before.census.winding;
  const double prefactor = units.hbar / units.e / dt;
  // Each unit of enclosed winding carries -pi of connection flux.
  out.emf = prefactor * std::numbers::pi * out.winding_change;

  const auto cores = config.cores();
  for (std::size_t j = 0; j < cores.size(); ++j) {
    if (before.census.inside[j] == after.census.inside[j]) continue;
    const bool entered = after.census.inside[j] != 0;
    if (cores[j].winding > 0) {
      (entered ? out.merons_in : out.merons_out) += 1;
    } else {
      (entered ? out.antimerons_in : out.antimerons_out) += 1;
    }
  }

  out.quadrature_emf = std::numeric_limits<double>::quiet_NaN();
  if (!std::isnan(before.integral) && !std::isnan(after.integral)) {
    const double delta = after.integral - before.integral;
    const double census_delta = -std::numbers::pi * out.winding_change;
    if (!(std::abs(delta - census_delta) <= 2.0 * tol)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "Berry EMF quadrature change %.12g disagrees with census %.12g (|diff| %.3g)",
                    delta, census_delta, std::abs(delta - census_delta));
      throw QuadratureFailure(msg);
    }
    out.quadrature_emf = -prefactor * delta;
  }
  return out;
}

BerryEmf berry_emf_flux_rule(const VortexConfig& config, const MovingLoop& loop, double t, double dt,
                             const UnitSystem& units, double tol, bool verify) {
  check_dt(dt);
  const BerryLoopState before = berry_loop_state(config, loop.at(t), tol, verify);
  const BerryLoopState after = berry_loop_state(config, loop.at(t + dt), tol, verify);
  return berry_emf_between(config, before, after, dt, units, tol);
}

namespace {

/// Closed integral over `loop` of (A_later - A_earlier) / (2 eta).
double time_derivative_term(const VortexConfig& earlier, const VortexConfig& later, double eta,
                            const PolyLoop& loop, double tol) {
  const VectorField2D a_plus = berry_connection_field(later);
  const VectorField2D a_minus = berry_connection_field(earlier);
  const VectorField2D rate = (a_plus + a_minus.scaled(-1.0)).scaled(0.5 / eta);
  return line_integral(rate, loop, tol);
}

/// Winding swept by the edges of C(t) over one step: the oriented
/// parallelograms (a, b, b + d, a + d) bound C(t) - C(t + dt) as a chain.
int swept_winding(const VortexConfig& config, const PolyLoop& loop, Vec2 shift) {
  int swept = 0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [a, b] = loop.edge(i);
    if (cross(b - a, shift) == 0.0) continue;  // edge slides along itself
    swept += winding_number(config, PolyLoop({a, b, b + shift, a + shift}));
  }
  return -swept;
}

}  // namespace

double berry_emf_line_form(const VortexConfig& config, const MovingLoop& loop, double t, double dt,
                           const UnitSystem& units, double tol) {
  check_dt(dt);
  const PolyLoop before = loop.at(t);
  // Ambiguity is judged on the loop positions, as for the flux form.
  enclosure_census(config, before);
  enclosure_census(config, loop.at(t + dt));

  // Static cores: the connection at t - dt/2 and t + dt/2 is the same field.
  const double induction = time_derivative_term(config, config, 0.5 * dt, before, tol);
  // Time-integrated closed integral of v0 x B over the step: pi per unit of
  // swept winding (B carries -pi per core, and v0 x B . dr = -B v0 . n ds).
  const double lorentz_integral = std::numbers::pi * swept_winding(config, before, loop.drift * dt);
  return -(units.hbar / units.e) * (induction - lorentz_integral / dt);
}

}  // namespace vemf
