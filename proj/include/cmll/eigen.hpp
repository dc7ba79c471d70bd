#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cmll/matrix.hpp"

namespace cmll {

/// Eigenpairs sorted by non-increasing value; column j of `vectors` pairs with values[j].
struct EigPairs {
  std::vector<double> values;
  Matrix vectors;
};

/// Full decomposition of a symmetric matrix (Householder tridiagonalization followed by
/// implicit QL). Values descending; each eigenvector's largest-magnitude entry (lowest
/// index on ties) is positive.
///
/// Throws InvalidInput when `a` is not square or asymmetric beyond 1e-10 relative to
/// its largest entry, NumericError when QL fails to converge.
EigPairs sym_eig(const Matrix& a);

/// The k algebraically largest eigenpairs of a symmetric matrix, 1 <= k <= rows.
EigPairs sym_eig_topk(const Matrix& a, std::size_t k);

/// 1e-8 * trace(Q) / rows: scale-aware jitter that keeps Cholesky of a rank-deficient
/// kernel matrix stable.
double default_metric_ridge(const Matrix& q);

/// Top-k solutions of B r = theta (Q + ridge I) r normalized so r^t (Q + ridge I) r = 1.
///
/// Reduces to a standard problem through the Cholesky factor L of Q + ridge I:
/// eigenvectors u of L^-1 B L^-t map back as r = L^-t u. `ridge` defaults to
/// default_metric_ridge(Q). Factorization failure surfaces as NumericError carrying
/// the pivot index.
EigPairs gen_sym_eig_topk(const Matrix& b, const Matrix& q, std::size_t k,
                          std::optional<double> ridge = std::nullopt);

/// Flips the sign of a vector so its largest-magnitude entry (lowest index on ties)
/// is positive.
void canonicalize_sign(std::span<double> v);
/// Applies canonicalize_sign to every column.
void canonicalize_column_signs(Matrix& vectors);

}  // namespace cmll
