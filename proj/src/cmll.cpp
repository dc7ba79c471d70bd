#include "cmll/cmll.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmll/error.hpp"
#include "cmll/random.hpp"

namespace cmll {

void validate_params(const CmllParams& params, std::size_t d_limit, std::size_t labels) {
  if (params.m < 1 || params.m > labels) {
    throw InvalidInput("m=" + std::to_string(params.m) + " outside [1, " + std::to_string(labels) + "]");
  }
  if (params.d < 1 || params.d > d_limit) {
    throw InvalidInput("d=" + std::to_string(params.d) + " outside [1, " + std::to_string(d_limit) + "]");
  }
  if (!(params.tol > 0.0)) throw InvalidInput("tol must be positive");
  if (params.maxc < 1) throw InvalidInput("maxc must be at least 1");
  if (!(params.beta >= 0.0) || !std::isfinite(params.beta)) {
    throw InvalidInput("beta must be finite and non-negative");
  }
  if (!(params.lambda >= 0.0) || !std::isfinite(params.lambda)) {
    throw InvalidInput("lambda must be finite and non-negative");
  }
}

std::size_t dimension_from_ratio(double ratio, std::size_t total) {
  if (!(ratio > 0.0) || ratio > 1.0) throw InvalidInput("compression ratio must lie in (0, 1]");
  const auto rounded = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(total)));
  return std::clamp<std::size_t>(rounded, 1, total);
}

std::string_view variant_name(CmllVariant v) {
  switch (v) {
    case CmllVariant::cmll: return "cmll";
    case CmllVariant::cmll_y: return "cmll_y";
    case CmllVariant::mddm: return "mddm";
  }
  return "?";
}

double dependence_term(const Matrix& v, const Matrix& p, const Matrix& xc) {
  if (xc.cols() != p.rows() || xc.rows() != v.rows()) {
    throw InvalidInput("dependence_term: dimension mismatch");
  }
  return squared_frobenius_norm(matmul_tn(matmul(xc, p), v));
}

double recovery_term(const Matrix& v, const Matrix& y) {
  if (y.rows() != v.rows()) throw InvalidInput("recovery_term: dimension mismatch");
  return squared_frobenius_norm(matmul_tn(y, v));
}

double objective_gamma(const Matrix& v, const Matrix& p, const Matrix& xc, const Matrix& y, double beta) {
  return beta * dependence_term(v, p, xc) + recovery_term(v, y);
}

Matrix decoder_W(const Matrix& v, const Matrix& y, double lambda) {
  if (v.rows() != y.rows()) throw InvalidInput("decoder_W: V and Y row counts differ");
  Matrix w = matmul_tn(v, y);
  const double scale = 1.0 + lambda;
  if (scale != 1.0) {
    for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] /= scale;
  }
  return w;
}

Matrix initial_projection(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  return orthonormalize_columns(Matrix::gaussian(rows, cols, rng));
}

CmllModel fit_cmll(const Dataset& data, const CmllParams& params, const std::optional<Matrix>& initial) {
  validate_dataset(data);
  validate_params(params, data.features(), data.labels());
  auto [xc, means] = center_columns(data.X);

  Matrix p0;
  if (initial) {
    if (initial->rows() != data.features() || initial->cols() != params.d) {
      throw InvalidInput("fit_cmll: initial projection must be D x d");
    }
    p0 = orthonormalize_columns(*initial);
  } else {
    p0 = initial_projection(data.features(), params.d, params.seed);
  }

  AlternationResult run = alternate(xc.transpose(), data.Y, std::move(p0), {params.beta, 1.0},
                                    params.m, params.maxc, params.tol);
  CmllModel model;
  model.variant = CmllVariant::cmll;
  model.P = std::move(run.u);
  model.V = std::move(run.v);
  model.W = decoder_W(model.V, data.Y, params.lambda);
  model.feature_means = std::move(means);
  model.params = params;
  model.initial_gamma = run.initial_gamma;
  model.trace = std::move(run.trace);
  model.converged = run.converged;
  return model;
}

CmllModel fit_cmll_y(const Dataset& data, const CmllParams& params) {
  validate_dataset(data);
  validate_params(params, data.features(), data.labels());
  if (params.d != data.features()) throw InvalidInput("fit_cmll_y: d must equal D");
  auto [xc, means] = center_columns(data.X);

  CmllModel model;
  model.variant = CmllVariant::cmll_y;
  model.P = Matrix::identity(data.features());
  model.V = alternation_v_step(xc, data.Y, {params.beta, 1.0}, params.m);
  model.W = decoder_W(model.V, data.Y, params.lambda);
  model.initial_gamma = objective_gamma(model.V, model.P, xc, data.Y, params.beta);
  model.feature_means = std::move(means);
  model.params = params;
  model.converged = true;
  return model;
}

CmllModel fit_mddm(const Dataset& data, const CmllParams& params) {
  validate_dataset(data);
  validate_params(params, data.features(), data.labels());
  if (params.m != data.labels()) throw InvalidInput("fit_mddm: m must equal M");
  auto [xc, means] = center_columns(data.X);

  CmllModel model;
  model.variant = CmllVariant::mddm;
  model.P = alternation_u_step(xc.transpose(), data.Y, params.d);
  model.V = data.Y;
  model.W = Matrix::identity(data.labels());
  model.initial_gamma = objective_gamma(model.V, model.P, xc, data.Y, params.beta);
  model.feature_means = std::move(means);
  model.params = params;
  model.converged = true;
  return model;
}

Matrix encode_features(const CmllModel& model, const Matrix& x) {
  if (x.cols() != model.P.rows()) {
    throw InvalidInput("encode_features: expected " + std::to_string(model.P.rows()) +
                       " features, got " + std::to_string(x.cols()));
  }
  return matmul(subtract_row_vector(x, model.feature_means), model.P);
}

}  // namespace cmll
