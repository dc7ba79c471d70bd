#include "cmll/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "cmll/eigen.hpp"
#include "cmll/error.hpp"
#include "cmll/simd.hpp"

namespace cmll {

namespace {

constexpr double kRankThreshold = 1e-11;
constexpr double kAcceptNorm = 1e-8;

// Removes the components along the first `count` columns of `basis` (twice, for stability).
void project_out(const Matrix& basis, std::size_t count, std::vector<double>& x) {
  const std::size_t n = basis.rows();
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < count; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += basis(i, j) * x[i];
      for (std::size_t i = 0; i < n; ++i) x[i] -= s * basis(i, j);
    }
  }
}

// Tries to append `x` to the basis; accepted when enough of it survives projection.
bool try_append(Matrix& basis, std::size_t& count, std::vector<double> x) {
  const double before = std::sqrt(simd::dot(x.data(), x.data(), x.size()));
  if (before == 0.0) return false;
  project_out(basis, count, x);
  const double after = std::sqrt(simd::dot(x.data(), x.data(), x.size()));
  if (after <= kAcceptNorm * before) return false;
  for (double& xi : x) xi /= after;
  basis.set_column(count++, x);
  return true;
}

// Eigen-directions of G G^t with eigenvalue above the rank threshold, at most k of them.
std::vector<std::vector<double>> dominant_directions(const Matrix& g, std::size_t k) {
  std::vector<std::vector<double>> out;
  const std::size_t n = g.rows();
  const std::size_t c = g.cols();
  if (n == 0 || c == 0 || k == 0) return out;

  if (c <= n) {
    const EigPairs e = sym_eig(gram(g));
    const double cutoff = std::max(e.values.front(), 0.0) * kRankThreshold;
    for (std::size_t j = 0; j < c && out.size() < k; ++j) {
      const double val = e.values[j];
      if (!(val > cutoff) || val <= 0.0) break;
      std::vector<double> u(n, 0.0);
      const std::vector<double> coeff = e.vectors.column(j);
      for (std::size_t i = 0; i < n; ++i) u[i] = simd::dot(g.row(i).data(), coeff.data(), c);
      const double scale = 1.0 / std::sqrt(val);
      for (double& ui : u) ui *= scale;
      out.push_back(std::move(u));
    }
  } else {
    const EigPairs e = sym_eig_topk(outer_gram(g), std::min(k, n));
    const double cutoff = std::max(e.values.front(), 0.0) * kRankThreshold;
    for (std::size_t j = 0; j < e.values.size(); ++j) {
      if (!(e.values[j] > cutoff) || e.values[j] <= 0.0) break;
      out.push_back(e.vectors.column(j));
    }
  }
  return out;
}

}  // namespace

Matrix top_left_subspace(const Matrix& g, std::size_t k, const Matrix* fallback) {
  const std::size_t n = g.rows();
  if (k < 1 || k > n) {
    throw InvalidInput("subspace size " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  Matrix basis(n, k);
  std::size_t count = 0;
  for (auto& u : dominant_directions(g, k)) {
    if (count == k) break;
    try_append(basis, count, std::move(u));
  }

  if (count < k && fallback != nullptr && fallback->rows() == n) {
    Matrix residual = *fallback;
    for (std::size_t j = 0; j < residual.cols(); ++j) {
      std::vector<double> col = residual.column(j);
      project_out(basis, count, col);
      residual.set_column(j, col);
    }
    for (auto& u : dominant_directions(residual, k - count)) {
      if (count == k) break;
      try_append(basis, count, std::move(u));
    }
  }
  for (std::size_t axis = 0; count < k && axis < n; ++axis) {
    std::vector<double> e(n, 0.0);
    e[axis] = 1.0;
    try_append(basis, count, std::move(e));
  }
  if (count < k) throw NumericError("could not complete an orthonormal basis");

  basis = orthonormalize_columns(basis);
  canonicalize_column_signs(basis);
  return basis;
}

Matrix alternation_v_step(const Matrix& f, const Matrix& y, AlternationWeights w, std::size_t m) {
  Matrix parts;
  if (w.dependence > 0.0 && w.recovery > 0.0) {
    parts = hcat(f * std::sqrt(w.dependence), y * std::sqrt(w.recovery));
  } else if (w.dependence > 0.0) {
    parts = f * std::sqrt(w.dependence);
  } else {
    parts = y * std::sqrt(w.recovery);
  }
  return top_left_subspace(parts, m, &f);
}

Matrix alternation_u_step(const Matrix& z, const Matrix& v, std::size_t d) {
  return top_left_subspace(matmul(z, v), d, &z);
}

double alternation_gamma(const Matrix& f, const Matrix& y, const Matrix& v, AlternationWeights w) {
  double g = 0.0;
  if (w.dependence != 0.0) g += w.dependence * squared_frobenius_norm(matmul_tn(f, v));
  if (w.recovery != 0.0) g += w.recovery * squared_frobenius_norm(matmul_tn(y, v));
  return g;
}

AlternationResult alternate(const Matrix& z, const Matrix& y, Matrix u0, AlternationWeights w,
                            std::size_t m, std::size_t maxc, double tol) {
  if (u0.rows() != z.rows()) throw InvalidInput("alternate: initial basis has wrong row count");
  if (maxc < 1) throw InvalidInput("alternate: maxc must be at least 1");
  AlternationResult out;
  out.u = std::move(u0);
  Matrix f = matmul_tn(z, out.u);
  out.v = alternation_v_step(f, y, w, m);
  out.initial_gamma = alternation_gamma(f, y, out.v, w);

  double previous = out.initial_gamma;
  for (std::size_t sweep = 1; sweep <= maxc; ++sweep) {
    if (sweep > 1) out.v = alternation_v_step(f, y, w, m);
    out.u = alternation_u_step(z, out.v, out.u.cols());
    f = matmul_tn(z, out.u);
    const double gamma = alternation_gamma(f, y, out.v, w);
    const double delta = std::abs(gamma - previous) / std::max(std::abs(previous), 1e-12);
    out.trace.push_back({gamma, delta});
    previous = gamma;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace cmll
