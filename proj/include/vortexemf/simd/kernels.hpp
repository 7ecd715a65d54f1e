#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; vector variants are selected at runtime from the CPU
// feature set and must agree with the reference (bit-exactly for the
// census, to reduction round-off for the sums).

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace vemf::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// Vortex cores in structure-of-arrays layout.
struct CoreArrays {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

struct GradientSample {
  double gx = 0.0;
  double gy = 0.0;
  double min_r2 = 0.0;  // squared distance to the nearest core (inf if none)
};

struct KernelTable {
  Isa isa = Isa::scalar;

  /// sum_j w_j * (-(py - y_j), px - x_j) / |p - r_j|^2.
  GradientSample (*vortex_gradient)(const CoreArrays& cores, double px, double py) = nullptr;

  /// Even-odd ray-casting parity of every point against a closed polygon.
  /// inside[i] is 0/1; near[i] is set to 1 when the point lies within
  /// sqrt(eps2) of any edge (never cleared).
  void (*polygon_parity)(std::span<const double> px, std::span<const double> py,
                         std::span<const double> vx, std::span<const double> vy, double eps2,
                         std::span<std::uint8_t> inside, std::span<std::uint8_t> near) = nullptr;

  /// sum_k Im(conj(a_k) * b_k).
  double (*im_conj_dot)(std::span<const std::complex<double>> a,
                        std::span<const std::complex<double>> b) = nullptr;

  /// sum_k |a_k|^2.
  double (*abs2_sum)(std::span<const std::complex<double>> a) = nullptr;
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

/// Best available table. VORTEXEMF_KERNELS=scalar forces the reference.
const KernelTable& active_kernels();

}  // namespace vemf::simd
