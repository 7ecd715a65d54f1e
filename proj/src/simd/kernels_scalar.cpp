#include <cmath>

#include "simd/kernels_impl.hpp"
#include "vortexemf/simd/kernels.hpp"

namespace vemf::simd {

namespace detail {

GradientSample vortex_gradient_scalar(const CoreArrays& cores, double px, double py) {
  GradientSample out{0.0, 0.0, INFINITY};
  const std::size_t n = cores.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double dx = px - cores.x[j];
    const double dy = py - cores.y[j];
    const double r2 = dx * dx + dy * dy;
    const double s = cores.w[j] / r2;
    out.gx -= s * dy;
    out.gy += s * dx;
    if (r2 < out.min_r2) out.min_r2 = r2;
  }
  return out;
}

void polygon_parity_scalar(std::span<const double> px, std::span<const double> py,
                           std::span<const double> vx, std::span<const double> vy, double eps2,
                           std::span<std::uint8_t> inside, std::span<std::uint8_t> near) {
  const std::size_t nv = vx.size();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const double x = px[i];
    const double y = py[i];
    std::uint8_t parity = 0;
    std::uint8_t close = near[i];
    for (std::size_t k = 0; k < nv; ++k) {
      const std::size_t k1 = k + 1 == nv ? 0 : k + 1;
      const double ax = vx[k], ay = vy[k], bx = vx[k1], by = vy[k1];
      if ((ay > y) != (by > y)) {
        const double xc = ax + (bx - ax) * (y - ay) / (by - ay);
        if (x < xc) parity ^= 1;
      }
      close |= static_cast<std::uint8_t>(segment_distance2_raw(x, y, ax, ay, bx, by) < eps2);
    }
    inside[i] = parity;
    near[i] = close;
  }
}

double im_conj_dot_scalar(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  }
  return acc;
}

double abs2_sum_scalar(std::span<const std::complex<double>> a) {
  double acc = 0.0;
  for (const auto& z : a) acc += z.real() * z.real() + z.imag() * z.imag();
  return acc;
}

}  // namespace detail

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, &detail::vortex_gradient_scalar,
                                 &detail::polygon_parity_scalar, &detail::im_conj_dot_scalar,
                                 &detail::abs2_sum_scalar};
  return table;
}

}  // namespace vemf::simd
