#pragma once

#include <optional>
#include <vector>

#include "cmll/cmll.hpp"
#include "cmll/kernel.hpp"

namespace cmll {

struct KcmllModel {
  Matrix R;  // N x d, R^t (Q + ridge I) R = I
  Matrix V;  // N x m
  Matrix W;  // m x M
  Matrix X_train;
  KernelSpec spec;                       // always resolved
  std::vector<double> kernel_col_means;  // column means of the training kernel
  double metric_ridge = 0.0;
  CmllParams params;
  double initial_gamma = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;

  double final_gamma() const { return trace.empty() ? initial_gamma : trace.back().gamma; }
};

struct KcmllOptions {
  /// Jitter added to the training kernel for the R constraint; default_metric_ridge when empty.
  std::optional<double> metric_ridge;
  /// Starting coefficients (N x d); replaced by a seeded orthonormal start when empty.
  std::optional<Matrix> initial_r;
};

/// Kernel alternation: V-step on beta Qc R R^t Qc^t + Y Y^t with Qc = H Q, R-step on the
/// generalized problem Qc^t V V^t Qc r = theta (Q + ridge I) r. An rbf spec with the
/// median heuristic is resolved with params.seed.
KcmllModel fit_kcmll(const Dataset& data, const KernelSpec& spec, const CmllParams& params,
                     const KcmllOptions& options = {});

/// Rows R^t (q(X_train, x_i) - kernel_col_means).
Matrix kernel_project(const KcmllModel& model, const Matrix& x);

}  // namespace cmll
