#pragma once

#include <cstdint>
#include <vector>

#include "vortexemf/field.hpp"
#include "vortexemf/geometry.hpp"

namespace vemf {

struct QuadratureOptions {
  double tol = 1e-10;  // absolute error target for the whole loop
  int max_depth = 40;
  int initial_panels = 8;  // per edge, before singular breakpoints are added
};

/// Closed line integral of field . dr over the polygon by per-edge adaptive
/// Simpson bisection with Richardson extrapolation.
///
/// Throws SingularLoop when the loop passes within eps_core of a singular
/// point and QuadratureFailure when an interval exceeds max_depth.
double line_integral(const VectorField2D& field, const PolyLoop& loop, double tol);
double line_integral(const VectorField2D& field, const PolyLoop& loop,
                     const QuadratureOptions& options);

/// Which cores a loop encloses. Windings are counted with the loop
/// orientation, so a clockwise loop reports negated sums.
struct EnclosureCensus {
  std::vector<std::uint8_t> inside;  // per core, 0/1
  int winding = 0;                   // orientation * sum of enclosed w_j
  int merons = 0;                    // enclosed cores with w > 0
  int antimerons = 0;                // enclosed cores with w < 0
};

/// Exact point-in-polygon census. Cores within eps_core of an edge throw
/// AmbiguousEnclosure.
EnclosureCensus enclosure_census(const VortexConfig& config, const PolyLoop& loop);

/// (1/2pi) closed integral of grad(chi), computed exactly by census.
int winding_number(const VortexConfig& config, const PolyLoop& loop);

struct QuantizationReport {
  double numeric_integral = 0.0;
  long nearest_quantum = 0;
  double deviation = 0.0;     // |numeric - nearest_quantum * quantum_unit|
  double quantum_unit = 0.0;  // pi for A^MB, 2pi for grad(chi)
  long census_quantum = 0;    // quantum predicted by the exact census

  bool consistent() const { return nearest_quantum == census_quantum; }
};

/// Quadrature of the Berry connection against -pi * winding (natural units).
QuantizationReport verify_quantization(const VortexConfig& config, const PolyLoop& loop, double tol);

/// Quadrature of grad(chi) against 2pi * winding.
QuantizationReport verify_winding(const VortexConfig& config, const PolyLoop& loop, double tol);

}  // namespace vemf
