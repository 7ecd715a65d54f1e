#pragma once

#include <algorithm>

#include "vortexemf/simd/kernels.hpp"

namespace vemf::simd::detail {

// Shared by every variant so the near-edge test is bit-identical.
inline double segment_distance2_raw(double px, double py, double ax, double ay, double bx,
                                    double by) {
  const double ex = bx - ax;
  const double ey = by - ay;
  const double len2 = ex * ex + ey * ey;
  double s = len2 > 0.0 ? ((px - ax) * ex + (py - ay) * ey) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const double dx = px - (ax + s * ex);
  const double dy = py - (ay + s * ey);
  return dx * dx + dy * dy;
}

GradientSample vortex_gradient_scalar(const CoreArrays& cores, double px, double py);
void polygon_parity_scalar(std::span<const double> px, std::span<const double> py,
                           std::span<const double> vx, std::span<const double> vy, double eps2,
                           std::span<std::uint8_t> inside, std::span<std::uint8_t> near);
double im_conj_dot_scalar(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b);
double abs2_sum_scalar(std::span<const std::complex<double>> a);

const KernelTable* avx2_table_if_compiled();

}  // namespace vemf::simd::detail
