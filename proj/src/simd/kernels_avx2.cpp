// Compiled with -mavx2; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "simd/kernels_impl.hpp"

namespace vemf::simd::detail {

namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

GradientSample vortex_gradient_avx2(const CoreArrays& cores, double px, double py) {
  const std::size_t n = cores.size();
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  __m256d gx = _mm256_setzero_pd();
  __m256d gy = _mm256_setzero_pd();
  __m256d mr = _mm256_set1_pd(INFINITY);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vpx, _mm256_loadu_pd(cores.x.data() + j));
    const __m256d dy = _mm256_sub_pd(vpy, _mm256_loadu_pd(cores.y.data() + j));
    const __m256d r2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    const __m256d s = _mm256_div_pd(_mm256_loadu_pd(cores.w.data() + j), r2);
    gx = _mm256_sub_pd(gx, _mm256_mul_pd(s, dy));
    gy = _mm256_add_pd(gy, _mm256_mul_pd(s, dx));
    mr = _mm256_min_pd(mr, r2);
  }
  GradientSample out{hsum(gx), hsum(gy), hmin(mr)};
  for (; j < n; ++j) {
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

void polygon_parity_avx2(std::span<const double> px, std::span<const double> py,
                         std::span<const double> vx, std::span<const double> vy, double eps2,
                         std::span<std::uint8_t> inside, std::span<std::uint8_t> near) {
  const std::size_t n = px.size();
  const std::size_t nv = vx.size();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d veps2 = _mm256_set1_pd(eps2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(px.data() + i);
    const __m256d y = _mm256_loadu_pd(py.data() + i);
    __m256d parity = zero;  // lanes hold all-ones bit patterns when toggled
    __m256d close = zero;
    for (std::size_t k = 0; k < nv; ++k) {
      const std::size_t k1 = k + 1 == nv ? 0 : k + 1;
      const __m256d ax = _mm256_set1_pd(vx[k]);
      const __m256d ay = _mm256_set1_pd(vy[k]);
      const __m256d bx = _mm256_set1_pd(vx[k1]);
      const __m256d by = _mm256_set1_pd(vy[k1]);
      const __m256d straddle =
          _mm256_xor_pd(_mm256_cmp_pd(ay, y, _CMP_GT_OQ), _mm256_cmp_pd(by, y, _CMP_GT_OQ));
      const __m256d xc = _mm256_add_pd(
          ax, _mm256_div_pd(_mm256_mul_pd(_mm256_sub_pd(bx, ax), _mm256_sub_pd(y, ay)),
                            _mm256_sub_pd(by, ay)));
      const __m256d toggle = _mm256_and_pd(straddle, _mm256_cmp_pd(x, xc, _CMP_LT_OQ));
      parity = _mm256_xor_pd(parity, toggle);

      const __m256d ex = _mm256_sub_pd(bx, ax);
      const __m256d ey = _mm256_sub_pd(by, ay);
      const __m256d len2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
      __m256d s = _mm256_div_pd(
          _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(x, ax), ex), _mm256_mul_pd(_mm256_sub_pd(y, ay), ey)),
          len2);
      s = _mm256_min_pd(_mm256_max_pd(s, zero), one);
      const __m256d dx = _mm256_sub_pd(x, _mm256_add_pd(ax, _mm256_mul_pd(s, ex)));
      const __m256d dy = _mm256_sub_pd(y, _mm256_add_pd(ay, _mm256_mul_pd(s, ey)));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      close = _mm256_or_pd(close, _mm256_cmp_pd(d2, veps2, _CMP_LT_OQ));
    }
    const int pmask = _mm256_movemask_pd(parity);
    const int cmask = _mm256_movemask_pd(close);
    for (int lane = 0; lane < 4; ++lane) {
      inside[i + lane] = static_cast<std::uint8_t>((pmask >> lane) & 1);
      near[i + lane] = static_cast<std::uint8_t>(near[i + lane] | ((cmask >> lane) & 1));
    }
  }
  if (i < n) {
    polygon_parity_scalar(px.subspan(i), py.subspan(i), vx, vy, eps2, inside.subspan(i),
                          near.subspan(i));
  }
}

double im_conj_dot_avx2(std::span<const std::complex<double>> a,
                        std::span<const std::complex<double>> b) {
  const std::size_t n = a.size();
  const double* pa = reinterpret_cast<const double*>(a.data());
  const double* pb = reinterpret_cast<const double*>(b.data());
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  // Two complex numbers per register: lanes (re0, im0, re1, im1).
  for (; k + 4 <= n; k += 4) {
    const __m256d a0 = _mm256_loadu_pd(pa + 2 * k);
    const __m256d a1 = _mm256_loadu_pd(pa + 2 * k + 4);
    const __m256d b0 = _mm256_permute_pd(_mm256_loadu_pd(pb + 2 * k), 0b0101);
    const __m256d b1 = _mm256_permute_pd(_mm256_loadu_pd(pb + 2 * k + 4), 0b0101);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a0, b0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(a1, b1));
  }
  // acc lanes: (re*im', im*re', re*im', im*re'); even lanes minus odd lanes.
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double out = (lanes[0] + lanes[2]) - (lanes[1] + lanes[3]);
  for (; k < n; ++k) out += a[k].real() * b[k].imag() - a[k].imag() * b[k].real();
  return out;
}

double abs2_sum_avx2(std::span<const std::complex<double>> a) {
  const std::size_t n = a.size();
  const double* pa = reinterpret_cast<const double*>(a.data());
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d a0 = _mm256_loadu_pd(pa + 2 * k);
    const __m256d a1 = _mm256_loadu_pd(pa + 2 * k + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a0, a0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(a1, a1));
  }
  double out = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) out += a[k].real() * a[k].real() + a[k].imag() * a[k].imag();
  return out;
}

}  // namespace

const KernelTable* avx2_table_if_compiled() {
  static const KernelTable table{Isa::avx2, &vortex_gradient_avx2, &polygon_parity_avx2,
                                 &im_conj_dot_avx2, &abs2_sum_avx2};
  return &table;
}

}  // namespace vemf::simd::detail
