#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "vortexemf/simd/kernels.hpp"

using namespace vemf::simd;

namespace {

CoreArrays random_cores(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::bernoulli_distribution s(0.5);
  CoreArrays c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(u(rng));
    c.y.push_back(u(rng));
    c.w.push_back(s(rng) ? 1.0 : -1.0);
  }
  return c;
}

}  // namespace

TEST_CASE("scalar table is always available and first") {
  const auto tables = available_kernels();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == Isa::scalar);
  MESSAGE("active kernels: " << to_string(active_kernels().isa));
}

TEST_CASE("vortex_gradient variants agree with the scalar reference") {
  std::mt19937_64 rng(11);
  const KernelTable& ref = scalar_kernels();
  for (const KernelTable* t : available_kernels()) {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 300u}) {
      const CoreArrays cores = random_cores(rng, n);
      std::uniform_real_distribution<double> u(0.0, 10.0);
      for (int k = 0; k < 50; ++k) {
        const double px = u(rng), py = u(rng);
        const GradientSample a = ref.vortex_gradient(cores, px, py);
        const GradientSample b = t->vortex_gradient(cores, px, py);
        // Only the summation order differs.
        double scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) scale += 1.0 / std::hypot(px - cores.x[j], py - cores.y[j]);
        CHECK(std::abs(a.gx - b.gx) <= 1e-14 * scale + 1e-300);
        CHECK(std::abs(a.gy - b.gy) <= 1e-14 * scale + 1e-300);
        CHECK(a.min_r2 == b.min_r2);
      }
    }
  }
}

TEST_CASE("polygon_parity variants are bit-identical to the scalar reference") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  const KernelTable& ref = scalar_kernels();
  // A concave polygon plus axis-aligned edges that hit the horizontal-edge case.
  const std::vector<double> vx{1, 9, 9, 5, 5, 1};
  const std::vector<double> vy{1, 1, 9, 9, 4, 4};
  for (const KernelTable* t : available_kernels()) {
    for (std::size_t n : {1u, 4u, 7u, 1000u}) {
      std::vector<double> px(n), py(n);
      for (std::size_t i = 0; i < n; ++i) {
        px[i] = u(rng);
        py[i] = (i % 5 == 0) ? 4.0 : u(rng);  // exactly on a horizontal edge's line
      }
      std::vector<std::uint8_t> in_a(n), near_a(n, 0), in_b(n), near_b(n, 0);
      ref.polygon_parity(px, py, vx, vy, 0.01, in_a, near_a);
      t->polygon_parity(px, py, vx, vy, 0.01, in_b, near_b);
      CHECK(in_a == in_b);
      CHECK(near_a == near_b);
    }
  }
}

TEST_CASE("polygon_parity never clears a preset near flag") {
  const std::vector<double> vx{0, 1, 1, 0}, vy{0, 0, 1, 1};
  for (const KernelTable* t : available_kernels()) {
    std::vector<double> px{0.5, 0.5, 0.5, 0.5, 3.0}, py{0.5, 0.5, 0.5, 0.5, 3.0};
    std::vector<std::uint8_t> in(5), near{1, 0, 0, 0, 1};
    t->polygon_parity(px, py, vx, vy, 1e-6, in, near);
    CHECK(near == std::vector<std::uint8_t>{1, 0, 0, 0, 1});
    CHECK(in == std::vector<std::uint8_t>{1, 1, 1, 1, 0});
  }
}

TEST_CASE("complex reductions agree with the scalar reference") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  const KernelTable& ref = scalar_kernels();
  for (const KernelTable* t : available_kernels()) {
    for (std::size_t n : {0u, 1u, 2u, 3u, 5u, 8u, 1001u}) {
      std::vector<std::complex<double>> a(n), b(n);
      double scale = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        a[k] = {g(rng), g(rng)};
        b[k] = {g(rng), g(rng)};
        scale += std::abs(a[k]) * std::abs(b[k]);
      }
      CHECK(std::abs(ref.im_conj_dot(a, b) - t->im_conj_dot(a, b)) <= 1e-14 * scale + 1e-300);
      CHECK(std::abs(ref.abs2_sum(a) - t->abs2_sum(a)) <= 1e-14 * ref.abs2_sum(a) + 1e-300);
    }
  }
  // Im(conj(a) b) for a = 1 + 2i, b = 3 - i: (1)(-1) - (2)(3) = -7.
  const std::vector<std::complex<double>> a{{1, 2}}, b{{3, -1}};
  CHECK(ref.im_conj_dot(a, b) == -7.0);
  CHECK(ref.abs2_sum(a) == 5.0);
}
