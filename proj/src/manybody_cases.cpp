#include "vortexemf/manybody_cases.hpp"

#include <algorithm>
#include <cmath>

namespace vemf {

namespace {

double gaussian(Vec2 p, Vec2 center, double sigma) {
  const Vec2 d = p - center;
  return std::exp(-dot(d, d) / (2.0 * sigma * sigma));
}

/// |r - r0| exp(-i theta) = conj(dx + i dy) = dx - i dy.
std::complex<double> vortex_factor(Vec2 p, Vec2 core) { return {p.x - core.x, -(p.y - core.y)}; }

}  // namespace

GridWaveFunction plane_wave_state(const Grid& grid, Vec2 k, double sigma, Vec2 center) {
  return GridWaveFunction::sample(grid, 1, GridWaveFunction::Amplitude1([=](Vec2 p, int) {
    return std::polar(gaussian(p, center, sigma), dot(k, p));
  }));
}

GridWaveFunction singlet_plane_wave_state(const Grid& grid, Vec2 k, double sigma, Vec2 center) {
  return GridWaveFunction::sample(grid, 2, GridWaveFunction::Amplitude2([=](Vec2 r1, int s1, Vec2 r2, int s2) {
    const double spin = (s1 == 0 && s2 == 1) ? 1.0 : (s1 == 1 && s2 == 0) ? -1.0 : 0.0;
    if (spin == 0.0) return std::complex<double>{};
    return spin * std::polar(gaussian(r1, center, sigma), dot(k, r1)) *
           std::polar(gaussian(r2, center, sigma), dot(k, r2));
  }));
}

GridWaveFunction vortex_phase_state(const Grid& grid, Vec2 core, double sigma) {
  return GridWaveFunction::sample(grid, 1, GridWaveFunction::Amplitude1([=](Vec2 p, int) {
    return vortex_factor(p, core) * gaussian(p, core, sigma);
  }));
}

GridWaveFunction triplet_vortex_state(const Grid& grid, Vec2 core, double sigma) {
  return GridWaveFunction::sample(grid, 1, GridWaveFunction::Amplitude2([=](Vec2 r1, int, Vec2 r2, int) {
    // Real orbitals: a Gaussian, and the same Gaussian times (y - y0 + 0.1).
    const double a1 = gaussian(r1, core, sigma), a2 = gaussian(r2, core, sigma);
    const double b1 = (r1.y - core.y + 0.1) * a1, b2 = (r2.y - core.y + 0.1) * a2;
    const double det = a1 * b2 - b1 * a2;
    return vortex_factor(r1, core) * vortex_factor(r2, core) * det;
  }));
}

Vec2 vortex_phase_connection(Vec2 core, Vec2 p) {
  const Vec2 d = p - core;
  const double r2 = dot(d, d);
  return {d.y / r2, -d.x / r2};
}

std::vector<double> ConvergenceStudy::ratios() const {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    out.push_back(levels[k].max_error / levels[k + 1].max_error);
  }
  return out;
}

double ConvergenceStudy::error_constant() const {
  double c = 0.0;
  for (const auto& l : levels) c = std::max(c, l.max_error / (l.h * l.h));
  return c;
}

ConvergenceStudy connection_convergence(ReferenceCase which, std::vector<std::size_t> sizes,
                                        double exclusion) {
  ConvergenceStudy study;
  for (std::size_t n : sizes) {
    const Grid grid{n, n, 1.0 / static_cast<double>(n - 1)};
    ConvergenceLevel level{n, grid.h, 0.0};
    if (which == ReferenceCase::plane_wave) {
      const auto a = berry_connection_mb(
          plane_wave_state(grid, kReferenceWaveVector, kReferencePlaneWaveSigma, {0.5, 0.5}));
      level.max_error = a.max_deviation([](Vec2) { return kReferenceWaveVector; });
    } else {
      const auto a = berry_connection_mb(vortex_phase_state(grid, kReferenceCore, kReferenceVortexSigma));
      level.max_error = a.max_deviation([](Vec2 p) { return vortex_phase_connection(kReferenceCore, p); },
                                        [=](Vec2 p) { return norm(p - kReferenceCore) >= exclusion; });
    }
    study.levels.push_back(level);
  }
  return study;
}

}  // namespace vemf
