#pragma once

#include "cmll/simd.hpp"

namespace cmll::simd::detail {

#if defined(CMLL_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif

#if defined(CMLL_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace cmll::simd::detail
