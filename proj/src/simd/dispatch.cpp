#include <cstdlib>
#include <mutex>
#include <string>

#include "kernels_impl.hpp"
#include "smallcap/error.hpp"
#include "smallcap/simd/kernels.hpp"

namespace smallcap::simd {

namespace {

const KernelTable kScalar{Isa::scalar, detail::phase_sweep_scalar, detail::complex_mul_scalar,
                          detail::abs_pow_sum_int_scalar};

#if defined(SMALLCAP_HAVE_AVX2)
const KernelTable kAvx2{Isa::avx2, detail::phase_sweep_avx2, detail::complex_mul_avx2,
                        detail::abs_pow_sum_int_avx2};

bool cpu_has_avx2() {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* widest() {
#if defined(SMALLCAP_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const KernelTable* initial_selection() {
  if (const char* env = std::getenv("SMALLCAP_ISA")) {
    const std::string name(env);
    if (name == "scalar") return &kScalar;
    if (name == "avx2") {
      if (const KernelTable* t = kernels_for(Isa::avx2)) return t;
    }
  }
  return widest();
}

const KernelTable*& active_slot() {
  static const KernelTable* active = initial_selection();
  return active;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

const KernelTable* kernels_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &kScalar;
    case Isa::avx2:
#if defined(SMALLCAP_HAVE_AVX2)
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& kernels() { return *active_slot(); }

void select_isa(Isa isa) {
  const KernelTable* table = kernels_for(isa);
  if (table == nullptr) {
    throw ValidationError("instruction set not available: " + std::string(isa_name(isa)));
  }
  active_slot() = table;
}

}  // namespace smallcap::simd
