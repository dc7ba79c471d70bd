#pragma once

// Runtime-dispatched inner-loop kernels.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA on
// x86-64, NEON on AArch64) are compiled into separate translation units and chosen
// once at startup from CPU feature detection. Setting CMLL_SIMD=scalar|avx2|neon in
// the environment overrides the choice. Vector variants reassociate sums, so they
// agree with the scalar reference to rounding, not bitwise.

#include <cstddef>
#include <string_view>
#include <vector>

namespace cmll::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  const char* name;
  /// sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  /// sum_i (x[i] - y[i])^2
  double (*squared_distance)(const double* x, const double* y, std::size_t n);
  /// Plane rotation of two rows: x' = c x - s y, y' = s x + c y.
  void (*rotate)(double* x, double* y, double c, double s, std::size_t n);
};

const KernelTable& scalar_kernels() noexcept;

/// Table for `isa`, or nullptr when this build or this CPU lacks it.
const KernelTable* kernels_for(Isa isa) noexcept;

/// The table all library code goes through.
const KernelTable& active() noexcept;

/// Switch the active table. Returns false (and changes nothing) when `isa` is unavailable.
bool set_active(Isa isa) noexcept;

/// ISAs usable on this machine, scalar first.
std::vector<Isa> available_isas();

std::string_view isa_name(Isa isa) noexcept;

/// Restores the previously active table on scope exit. Not thread-safe against
/// concurrent library calls; intended for tests and benchmarks.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) noexcept : previous_(active().isa), ok_(set_active(isa)) {}
  ~ScopedIsa() { set_active(previous_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;
  bool ok() const noexcept { return ok_; }

 private:
  Isa previous_;
  bool ok_;
};

inline double dot(const double* x, const double* y, std::size_t n) { return active().dot(x, y, n); }
inline void axpy(double a, const double* x, double* y, std::size_t n) { active().axpy(a, x, y, n); }
inline double squared_distance(const double* x, const double* y, std::size_t n) {
  return active().squared_distance(x, y, n);
}
inline void rotate(double* x, double* y, double c, double s, std::size_t n) {
  active().rotate(x, y, c, s, n);
}

}  // namespace cmll::simd
