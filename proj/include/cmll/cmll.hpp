#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cmll/dataset.hpp"
#include "cmll/matrix.hpp"
#include "cmll/subspace.hpp"

namespace cmll {

struct CmllParams {
  double beta = 1.0;    // balance between dependence and recovery, alpha * (1 + lambda)
  double lambda = 0.0;  // decoder ridge
  std::size_t m = 1;    // embedded label dimension
  std::size_t d = 1;    // embedded feature dimension
  std::size_t maxc = 50;
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

/// Throws InvalidInput unless 1 <= m <= labels, 1 <= d <= d_limit, tol > 0, maxc >= 1,
/// beta and lambda finite and non-negative.
void validate_params(const CmllParams& params, std::size_t d_limit, std::size_t labels);

/// m = max(1, round(ratio * total)), capped at total.
std::size_t dimension_from_ratio(double ratio, std::size_t total);

enum class CmllVariant { cmll, cmll_y, mddm };
std::string_view variant_name(CmllVariant v);

struct CmllModel {
  CmllVariant variant = CmllVariant::cmll;
  Matrix P;  // D x d
  Matrix V;  // N x m
  Matrix W;  // m x M
  std::vector<double> feature_means;
  CmllParams params;
  double initial_gamma = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;

  /// Objective at the returned (V, P).
  double final_gamma() const { return trace.empty() ? initial_gamma : trace.back().gamma; }
};

/// beta * |(Xc P)^t V|_F^2 + |Y^t V|_F^2, the trace objective without forming N x N products.
double objective_gamma(const Matrix& v, const Matrix& p, const Matrix& xc, const Matrix& y, double beta);

/// tr[V^t Xc P P^t Xc^t V]
double dependence_term(const Matrix& v, const Matrix& p, const Matrix& xc);
/// tr[V^t Y Y^t V]
double recovery_term(const Matrix& v, const Matrix& y);

/// V^t Y / (1 + lambda)
Matrix decoder_W(const Matrix& v, const Matrix& y, double lambda);

/// Seeded Gaussian rows x cols matrix with orthonormalized columns.
Matrix initial_projection(std::size_t rows, std::size_t cols, std::uint64_t seed);

/// Alternating maximization over (V, P). `initial` overrides the seeded starting P.
CmllModel fit_cmll(const Dataset& data, const CmllParams& params,
                   const std::optional<Matrix>& initial = std::nullopt);

/// Label compression only: one V-solve with the full centered features (requires d == D).
CmllModel fit_cmll_y(const Dataset& data, const CmllParams& params);

/// Feature embedding only: one P-solve with V replaced by Y (requires m == M).
/// The decoder is the identity.
CmllModel fit_mddm(const Dataset& data, const CmllParams& params);

/// (X - e * feature_means^t) * P
Matrix encode_features(const CmllModel& model, const Matrix& x);

}  // namespace cmll
