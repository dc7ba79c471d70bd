#include <atomic>
#include <cstdlib>
#include <string_view>

#include "cmll/simd.hpp"
#include "simd_tables.hpp"

namespace cmll::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(CMLL_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* best_table() noexcept {
  if (const char* forced = std::getenv("CMLL_SIMD")) {
    const std::string_view name(forced);
    if (name == "scalar") return &scalar_kernels();
    if (name == "avx2" && kernels_for(Isa::avx2)) return kernels_for(Isa::avx2);
    if (name == "neon" && kernels_for(Isa::neon)) return kernels_for(Isa::neon);
  }
  if (const KernelTable* t = kernels_for(Isa::avx2)) return t;
  if (const KernelTable* t = kernels_for(Isa::neon)) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{best_table()};
  return table;
}

}  // namespace

const KernelTable* kernels_for(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return &scalar_kernels();
    case Isa::avx2:
#if defined(CMLL_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::avx2_kernels();
#endif
      return nullptr;
    case Isa::neon:
#if defined(CMLL_HAVE_NEON)
      return &detail::neon_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_acquire); }

bool set_active(Isa isa) noexcept {
  const KernelTable* table = kernels_for(isa);
  if (!table) return false;
  slot().store(table, std::memory_order_release);
  return true;
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (kernels_for(isa)) out.push_back(isa);
  }
  return out;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

}  // namespace cmll::simd
