#include "cmll/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cmll/error.hpp"
#include "cmll/simd.hpp"

namespace cmll {

namespace {

constexpr int kMaxQlIterations = 60;

void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(who) + ": matrix is not square");
  }
  require_finite(a, who);
  const double scale = max_abs(a);
  if (asymmetry(a) > 1e-10 * scale) {
    throw InvalidInput(std::string(who) + ": matrix is not symmetric");
  }
}

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> sub;  // sub[i] couples i and i+1; sub[n-1] == 0
  Matrix basis_t;           // rows are the columns of the orthogonal reduction Q
};

// Householder reduction A = Q T Q^t, working on rows so every inner loop is a
// contiguous dot or axpy.
Tridiagonal tridiagonalize(Matrix w) {
  const std::size_t n = w.rows();
  Tridiagonal out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), Matrix::identity(n)};
  std::vector<std::vector<double>> reflectors;
  std::vector<double> taus;

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;
    std::vector<double> v(w.row(k).begin() + static_cast<std::ptrdiff_t>(k + 1), w.row(k).end());
    const double norm = std::sqrt(simd::dot(v.data(), v.data(), m));
    if (norm == 0.0) {
      out.sub[k] = 0.0;
      reflectors.emplace_back();
      taus.push_back(0.0);
      continue;
    }
    const double alpha = v[0] >= 0.0 ? -norm : norm;
    v[0] -= alpha;
    const double tau = 2.0 / simd::dot(v.data(), v.data(), m);
    out.sub[k] = alpha;

    // Trailing block S <- H S H with H = I - tau v v^t.
    std::vector<double> p(m);
    for (std::size_t i = 0; i < m; ++i) {
      p[i] = tau * simd::dot(w.row(k + 1 + i).data() + k + 1, v.data(), m);
    }
    const double half = 0.5 * tau * simd::dot(p.data(), v.data(), m);
    simd::axpy(-half, v.data(), p.data(), m);
    for (std::size_t i = 0; i < m; ++i) {
      double* si = w.row(k + 1 + i).data() + k + 1;
      simd::axpy(-v[i], p.data(), si, m);
      simd::axpy(-p[i], v.data(), si, m);
    }
    reflectors.push_back(std::move(v));
    taus.push_back(tau);
  }

  for (std::size_t i = 0; i < n; ++i) out.diag[i] = w(i, i);
  if (n >= 2) out.sub[n - 2] = w(n - 1, n - 2);

  // basis_t = H_{n-3} ... H_1 H_0 = Q^t
  std::vector<double> acc(n);
  for (std::size_t k = 0; k < reflectors.size(); ++k) {
    if (taus[k] == 0.0) continue;
    const auto& v = reflectors[k];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      simd::axpy(v[i], out.basis_t.row(k + 1 + i).data(), acc.data(), n);
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
      simd::axpy(-taus[k] * v[i], acc.data(), out.basis_t.row(k + 1 + i).data(), n);
    }
  }
  return out;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal (diag, sub). Rotations are
// applied to rows of `vectors_t`, whose rows end up as the eigenvectors.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Matrix& vectors_t) {
  const std::size_t n = d.size();
  const std::size_t width = vectors_t.cols();
  const double eps = std::ldexp(1.0, -52);
  double shift_total = 0.0;
  double tst1 = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    std::size_t m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxQlIterations) {
          throw NumericError("symmetric eigensolver: QL iteration did not converge for eigenvalue " +
                             std::to_string(l));
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        shift_total += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          simd::rotate(vectors_t.row(i).data(), vectors_t.row(i + 1).data(), c, s, width);
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += shift_total;
    e[l] = 0.0;
  }
}

EigPairs decompose(const Matrix& a, std::size_t k) {
  const std::size_t n = a.rows();
  Tridiagonal t = tridiagonalize(symmetrized(a));
  tridiagonal_ql(t.diag, t.sub, t.basis_t);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return t.diag[x] > t.diag[y]; });

  EigPairs out{std::vector<double>(k), Matrix(n, k)};
  for (std::size_t j = 0; j < k; ++j) {
    out.values[j] = t.diag[order[j]];
    out.vectors.set_column(j, t.basis_t.row(order[j]));
  }
  canonicalize_column_signs(out.vectors);
  return out;
}

}  // namespace

void canonicalize_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

void canonicalize_column_signs(Matrix& vectors) {
  for (std::size_t j = 0; j < vectors.cols(); ++j) {
    std::vector<double> col = vectors.column(j);
    canonicalize_sign(col);
    vectors.set_column(j, col);
  }
}

EigPairs sym_eig(const Matrix& a) {
  require_symmetric(a, "sym_eig");
  return decompose(a, a.rows());
}

EigPairs sym_eig_topk(const Matrix& a, std::size_t k) {
  require_symmetric(a, "sym_eig_topk");
  if (k < 1 || k > a.rows()) {
    throw InvalidInput("sym_eig_topk: k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(a.rows()) + "]");
  }
  return decompose(a, k);
}

double default_metric_ridge(const Matrix& q) {
  if (q.rows() == 0) return 0.0;
  return 1e-8 * trace(q) / static_cast<double>(q.rows());
}

EigPairs gen_sym_eig_topk(const Matrix& b, const Matrix& q, std::size_t k,
                          std::optional<double> ridge) {
  require_symmetric(b, "gen_sym_eig_topk (B)");
  require_symmetric(q, "gen_sym_eig_topk (Q)");
  if (b.rows() != q.rows()) throw InvalidInput("gen_sym_eig_topk: B and Q differ in size");
  const double jitter = ridge.value_or(default_metric_ridge(q));
  if (!(jitter >= 0.0) || !std::isfinite(jitter)) {
    throw InvalidInput("gen_sym_eig_topk: ridge must be finite and non-negative");
  }
  if (k < 1 || k > b.rows()) {
    throw InvalidInput("gen_sym_eig_topk: k=" + std::to_string(k) + " outside [1, " +
                       std::to_string(b.rows()) + "]");
  }

  Matrix metric = q;
  for (std::size_t i = 0; i < metric.rows(); ++i) metric(i, i) += jitter;
  const Matrix lower = cholesky(metric);

  const Matrix half = solve_lower(lower, b);
  const Matrix reduced = symmetrized(solve_lower(lower, half.transpose()));
  EigPairs pairs = decompose(reduced, k);
  pairs.vectors = solve_lower_transposed(lower, pairs.vectors);
  canonicalize_column_signs(pairs.vectors);
  return pairs;
}

}  // namespace cmll
