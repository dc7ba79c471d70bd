#pragma once

#include <cstddef>
#include <vector>

#include "cmll/matrix.hpp"

namespace cmll {

/// Orthonormal basis (rows x k) of the top-k eigenspace of G G^t, computed from whichever
/// of G^t G or G G^t is smaller so the rows x rows product is never formed when G is thin.
///
/// When G has rank r < k the remaining k - r columns have eigenvalue zero and any
/// orthonormal completion is optimal. They are filled from the top eigenvectors of
/// `fallback` after projecting out the chosen span, then from coordinate axes.
/// Columns follow the largest-entry-positive sign rule.
Matrix top_left_subspace(const Matrix& g, std::size_t k, const Matrix* fallback = nullptr);

struct TraceEntry {
  double gamma = 0.0;
  double delta = 0.0;
};

/// Outcome of the alternating maximization of
///
///   dep_weight * |F^t V|_F^2 + rec_weight * |Y^t V|_F^2,   F = Z^t U,
///
/// over U^t U = I (K x d) and V^t V = I (N x m).
struct AlternationResult {
  Matrix u;
  Matrix v;
  double initial_gamma = 0.0;        // at (V^1, U^0)
  std::vector<TraceEntry> trace;     // one entry per sweep, at (V^j, U^j)
  bool converged = false;
};

struct AlternationWeights {
  double dependence = 1.0;
  double recovery = 1.0;
};

/// V-step: top-m eigenvectors of w_dep F F^t + w_rec Y Y^t through the thin factor
/// [sqrt(w_dep) F, sqrt(w_rec) Y].
Matrix alternation_v_step(const Matrix& f, const Matrix& y, AlternationWeights w, std::size_t m);

/// U-step: top-d eigenvectors of Z V V^t Z^t, completed from the dominant directions of Z.
Matrix alternation_u_step(const Matrix& z, const Matrix& v, std::size_t d);

double alternation_gamma(const Matrix& f, const Matrix& y, const Matrix& v, AlternationWeights w);

/// Sweeps V-step then U-step starting from `u0` until the relative change of the
/// objective drops below `tol` or `maxc` sweeps have run.
AlternationResult alternate(const Matrix& z, const Matrix& y, Matrix u0, AlternationWeights w,
                            std::size_t m, std::size_t maxc, double tol);

}  // namespace cmll
