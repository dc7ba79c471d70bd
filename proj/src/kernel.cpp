#include "cmll/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "cmll/error.hpp"
#include "cmll/random.hpp"
#include "cmll/simd.hpp"

namespace cmll {

std::string to_string(const KernelSpec& spec) {
  if (spec.kind == KernelKind::linear) return "linear";
  if (!spec.gamma) return "rbf(median)";
  char buf[48];
  std::snprintf(buf, sizeof buf, "rbf(%.6g)", *spec.gamma);
  return buf;
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw InvalidInput("kernel_matrix: inputs have " + std::to_string(a.cols()) + " and " +
                       std::to_string(b.cols()) + " columns");
  }
  if (spec.kind == KernelKind::linear) return matmul_nt(a, b);
  if (!spec.gamma) throw InvalidState("kernel_matrix: rbf gamma has not been resolved");
  const double gamma = *spec.gamma;
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw InvalidInput("kernel_matrix: rbf gamma must be positive and finite");
  }
  Matrix k(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      k(i, j) = std::exp(-gamma * simd::squared_distance(a.row(i).data(), b.row(j).data(), a.cols()));
    }
  }
  return k;
}

double resolve_gamma_median(const Matrix& x, std::uint64_t seed, std::size_t max_rows) {
  const std::size_t n = x.rows();
  if (n < 2) throw InvalidInput("median heuristic needs at least 2 rows");
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (n > max_rows && max_rows >= 2) {
    Rng rng(seed);
    for (std::size_t i = 0; i < max_rows; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
      std::swap(rows[i], rows[j]);
    }
    rows.resize(max_rows);
    std::sort(rows.begin(), rows.end());
  }

  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      dist.push_back(simd::squared_distance(x.row(rows[i]).data(), x.row(rows[j]).data(), x.cols()));
    }
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double median = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  if (!(median > 0.0)) {
    throw InvalidInput("median heuristic: median pairwise distance is zero (duplicate rows)");
  }
  return 1.0 / median;
}

KernelSpec resolve_kernel(const KernelSpec& spec, const Matrix& x, std::uint64_t seed) {
  if (spec.resolved()) return spec;
  return KernelSpec::rbf(resolve_gamma_median(x, seed));
}

}  // namespace cmll
