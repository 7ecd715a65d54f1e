#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "vortexemf/geometry.hpp"
#include "vortexemf/simd/kernels.hpp"
#include "vortexemf/units.hpp"

namespace vemf {

struct Core {
  Vec2 position;
  int winding = 1;  // odd
};

/// Static spin-vortex cores on a rectangular domain.
///
/// Invariants (checked on construction): odd windings, cores strictly
/// inside the domain, no two cores at the same position. The exclusion
/// radius eps_core defaults to 1e-6 * min(lx, ly).
class VortexConfig {
 public:
  explicit VortexConfig(Domain domain, std::vector<Core> cores = {}, double eps_core = 0.0);

  const Domain& domain() const { return domain_; }
  std::span<const Core> cores() const { return cores_; }
  std::size_t size() const { return cores_.size(); }
  bool empty() const { return cores_.empty(); }
  double eps_core() const { return eps_core_; }
  int total_winding() const;

  /// Structure-of-arrays copy shared by every field built from this config.
  const std::shared_ptr<const simd::CoreArrays>& arrays() const { return arrays_; }

  VortexConfig with_flipped_windings() const;
  /// Union of two configs on the same domain.
  VortexConfig merged(const VortexConfig& other) const;

 private:
  Domain domain_;
  std::vector<Core> cores_;
  double eps_core_;
  std::shared_ptr<const simd::CoreArrays> arrays_;
};

/// Immutable map from the plane to 2D vectors. Evaluating within eps_core of
/// a singular point throws SingularEvaluation.
class VectorField2D {
 public:
  using Evaluator = std::function<Vec2(Vec2)>;

  VectorField2D(Evaluator evaluator, std::vector<Vec2> singular_points = {}, double eps_core = 0.0);

  static VectorField2D zero();
  static VectorField2D constant(Vec2 value);

  Vec2 operator()(Vec2 p) const;
  Vec2 at(Vec2 p) const { return (*this)(p); }

  std::span<const Vec2> singular_points() const { return state_->singular; }
  double eps_core() const { return state_->eps_core; }

  /// Pointwise scale * field, same singular points.
  VectorField2D scaled(double scale) const;
  /// Pointwise a + b; singular points are the union.
  friend VectorField2D operator+(const VectorField2D& a, const VectorField2D& b);

 private:
  struct SelfChecked {};
  VectorField2D(SelfChecked, Evaluator evaluator, std::vector<Vec2> singular_points, double eps_core);

  struct State {
    Evaluator eval;
    std::vector<Vec2> singular;
    double eps_core = 0.0;
    bool self_checked = false;
  };
  std::shared_ptr<const State> state_;

  friend VectorField2D chi_gradient(const VortexConfig& config);
};

/// Closed-form gradient of the multivalued angle field
/// chi(r) = sum_j w_j * atan2(y - y_j, x - x_j).
VectorField2D chi_gradient(const VortexConfig& config);

/// Berry-connection vector potential A = -grad(chi) / 2.
VectorField2D berry_connection_field(const VortexConfig& config);

/// v = (e / m_e) A_em + (hbar / m_e) A_mb.
VectorField2D velocity_field(const VectorField2D& a_em, const VectorField2D& a_mb,
                             const UnitSystem& units);

using ScalarField2D = std::function<double(Vec2)>;

/// j = -e rho v. A negative density at an evaluated point throws InvalidDensity.
VectorField2D current_density(ScalarField2D rho, const VectorField2D& velocity,
                              const UnitSystem& units);

// Line-oriented text format: header "Lx Ly", then "x y w" per core. '#'
// starts a comment; blank lines are ignored.
VortexConfig read_vortex_config(std::istream& in);
void write_vortex_config(std::ostream& out, const VortexConfig& config);

// Same family for loops: one "x y" vertex per line, in order.
PolyLoop read_loop(std::istream& in);
void write_loop(std::ostream& out, const PolyLoop& loop);

}  // namespace vemf
