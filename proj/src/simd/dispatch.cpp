#include <cstdlib>
#include <string>

#include "simd/kernels_impl.hpp"
#include "vortexemf/simd/kernels.hpp"

namespace vemf::simd {

#ifndef VORTEXEMF_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table_if_compiled() { return nullptr; }
}  // namespace detail
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable* avx2_kernels() {
#if defined(__x86_64__) || defined(__i386__)
  static const bool supported = __builtin_cpu_supports("avx2");
  if (supported) return detail::avx2_table_if_compiled();
#endif
  return nullptr;
}

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* t = avx2_kernels()) out.push_back(t);
  return out;
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* force = std::getenv("VORTEXEMF_KERNELS");
    if (force != nullptr && std::string(force) == "scalar") return scalar_kernels();
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace vemf::simd
