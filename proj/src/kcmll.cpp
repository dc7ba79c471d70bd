#include "cmll/kcmll.hpp"

#include <string>

#include "cmll/eigen.hpp"
#include "cmll/error.hpp"

namespace cmll {

KcmllModel fit_kcmll(const Dataset& data, const KernelSpec& spec, const CmllParams& params,
                     const KcmllOptions& options) {
  validate_dataset(data);
  const std::size_t n = data.instances();
  validate_params(params, n, data.labels());

  KcmllModel model;
  model.spec = resolve_kernel(spec, data.X, params.seed);
  const Matrix q = kernel_matrix(model.spec, data.X, data.X);
  auto [qc, col_means] = center_columns(q);

  model.metric_ridge = options.metric_ridge.value_or(default_metric_ridge(q));
  if (!(model.metric_ridge >= 0.0)) throw InvalidInput("fit_kcmll: metric ridge must be non-negative");
  Matrix metric = q;
  for (std::size_t i = 0; i < n; ++i) metric(i, i) += model.metric_ridge;
  const Matrix lower = cholesky(metric);

  // In whitened coordinates U = L^t R the constraint becomes U^t U = I and the embedded
  // features are Qc R = (L^-1 Qc^t)^t U.
  const Matrix z = solve_lower(lower, qc.transpose());

  Matrix u0;
  if (options.initial_r) {
    if (options.initial_r->rows() != n || options.initial_r->cols() != params.d) {
      throw InvalidInput("fit_kcmll: initial coefficients must be N x d");
    }
    u0 = orthonormalize_columns(matmul_tn(lower, *options.initial_r));
  } else {
    u0 = initial_projection(n, params.d, params.seed);
  }

  AlternationResult run = alternate(z, data.Y, std::move(u0), {params.beta, 1.0}, params.m,
                                    params.maxc, params.tol);
  model.R = solve_lower_transposed(lower, run.u);
  model.V = std::move(run.v);
  model.W = decoder_W(model.V, data.Y, params.lambda);
  model.X_train = data.X;
  model.kernel_col_means = std::move(col_means);
  model.params = params;
  model.initial_gamma = run.initial_gamma;
  model.trace = std::move(run.trace);
  model.converged = run.converged;
  return model;
}

Matrix kernel_project(const KcmllModel& model, const Matrix& x) {
  if (x.cols() != model.X_train.cols()) {
    throw InvalidInput("kernel_project: expected " + std::to_string(model.X_train.cols()) +
                       " features, got " + std::to_string(x.cols()));
  }
  const Matrix k = kernel_matrix(model.spec, x, model.X_train);
  return matmul(subtract_row_vector(k, model.kernel_col_means), model.R);
}

}  // namespace cmll
