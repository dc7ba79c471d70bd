#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "cmll/matrix.hpp"

namespace cmll {

enum class KernelKind { linear, rbf };

/// A kernel choice. For rbf, an empty gamma means "median heuristic, not yet resolved".
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  std::optional<double> gamma;

  static KernelSpec linear() { return {}; }
  static KernelSpec rbf(double gamma) { return {KernelKind::rbf, gamma}; }
  static KernelSpec rbf_median() { return {KernelKind::rbf, std::nullopt}; }

  bool resolved() const noexcept { return kind == KernelKind::linear || gamma.has_value(); }
};

std::string to_string(const KernelSpec& spec);

/// k(a_i, b_j) for all row pairs: A B^t for linear, exp(-gamma |a_i - b_j|^2) for rbf.
/// Throws InvalidState when an rbf gamma is unresolved.
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

/// 1 / median pairwise squared distance over at most `max_rows` rows drawn with `seed`
/// (all rows when N <= max_rows). An even pair count averages the two middle values.
double resolve_gamma_median(const Matrix& x, std::uint64_t seed = 0, std::size_t max_rows = 1000);

/// Copy of `spec` with the median heuristic resolved against `x` when needed.
KernelSpec resolve_kernel(const KernelSpec& spec, const Matrix& x, std::uint64_t seed = 0);

}  // namespace cmll
