#include "cmll/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cmll/error.hpp"
#include "cmll/random.hpp"

namespace cmll {

Dataset make_synthetic(const SyntheticSpec& spec) {
  const std::size_t n = spec.instances;
  const std::size_t k = spec.latent;
  const std::size_t dims = spec.latent + spec.noise_dims;
  const std::size_t m = spec.labels;
  if (n < 2 || k < 1 || m < 2) throw InvalidInput("make_synthetic: degenerate sizes");
  if (!(spec.cardinality > 0.0) || spec.cardinality >= static_cast<double>(m)) {
    throw InvalidInput("make_synthetic: cardinality must lie in (0, labels)");
  }
  Rng rng(spec.seed);

  const Matrix z = Matrix::gaussian(n, k, rng);
  Matrix raw(n, dims);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) raw(i, j) = z(i, j);
    for (std::size_t j = k; j < dims; ++j) raw(i, j) = spec.noise_scale * rng.normal();
  }
  const Matrix rotation = orthonormalize_columns(Matrix::gaussian(dims, dims, rng));
  Matrix x = matmul(raw, rotation);
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += spec.feature_noise * rng.normal();

  const Matrix w_true = Matrix::gaussian(k, m, rng);
  Matrix logits = matmul(z, w_true);
  if (spec.label_noise > 0.0) {
    for (std::size_t i = 0; i < logits.size(); ++i) logits.data()[i] += spec.label_noise * rng.normal();
  }

  // Per-label positive rates spread around cardinality / M; the bias puts the
  // threshold at the matching empirical quantile.
  const double base = spec.cardinality / static_cast<double>(m);
  Matrix y(n, m);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < m; ++j) {
    const double rate = std::clamp(base * rng.uniform(0.5, 1.5), 1.0 / static_cast<double>(n), 0.95);
    const auto positives = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rate * static_cast<double>(n))));
    for (std::size_t i = 0; i < n; ++i) column[i] = logits(i, j);
    std::vector<double> sorted = column;
    std::sort(sorted.begin(), sorted.end());
    const double bias = -0.5 * (sorted[n - positives - 1] + sorted[n - positives]);
    for (std::size_t i = 0; i < n; ++i) y(i, j) = column[i] + bias > 0.0 ? 1.0 : 0.0;
  }
  return Dataset{std::move(x), std::move(y), "synthetic-" + std::to_string(spec.seed)};
}

}  // namespace cmll
