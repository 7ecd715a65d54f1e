#pragma once

// Reference states with closed-form Berry connections, used by the
// manybody-check command and the verification suites.

#include <vector>

#include "vortexemf/manybody.hpp"

namespace vemf {

/// exp(i k.r) g(r) with an isotropic Gaussian g; connection = k.
GridWaveFunction plane_wave_state(const Grid& grid, Vec2 k, double sigma, Vec2 center);

/// Spin singlet of two electrons in the same plane-wave orbital; connection = k.
GridWaveFunction singlet_plane_wave_state(const Grid& grid, Vec2 k, double sigma, Vec2 center);

/// exp(-i chi / 2) Psi0 with chi = 2 atan2(y - y0, x - x0) and the real
/// Psi0 = |r - r0| g(r), which vanishes at the core; connection = -grad(atan2).
GridWaveFunction vortex_phase_state(const Grid& grid, Vec2 core, double sigma);

/// Spin-polarized two-electron Slater determinant of real orbitals times the
/// same vortex phase on both electrons; connection = -grad(atan2).
GridWaveFunction triplet_vortex_state(const Grid& grid, Vec2 core, double sigma);

/// -grad(atan2(y - y0, x - x0)), the analytic connection of the vortex states.
Vec2 vortex_phase_connection(Vec2 core, Vec2 p);

struct ConvergenceLevel {
  std::size_t n = 0;
  double h = 0.0;
  double max_error = 0.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceLevel> levels;
  /// err(level k) / err(level k + 1)
  std::vector<double> ratios() const;
  /// max_k err_k / h_k^2
  double error_constant() const;
};

enum class ReferenceCase { plane_wave, vortex_phase };

/// Max-norm error of the grid connection on nested n x n meshes of the unit
/// square (n = 16, 31, 61 halve the spacing). The vortex case skips points
/// closer than `exclusion` to the core.
ConvergenceStudy connection_convergence(ReferenceCase which, std::vector<std::size_t> sizes = {16, 31, 61},
                                        double exclusion = 0.25);

/// Parameters shared by the reference studies.
inline constexpr Vec2 kReferenceWaveVector{1.3, -0.7};
inline constexpr double kReferencePlaneWaveSigma = 1.0;
inline constexpr double kReferenceVortexSigma = 0.25;
/// Off-mesh core position: never on any of the nested grids.
inline constexpr Vec2 kReferenceCore{0.5 + 0.3 / 15.0, 0.5 + 0.17 / 15.0};

}  // namespace vemf
