#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmll/dataset.hpp"
#include "cmll/kernel.hpp"
#include "cmll/learner.hpp"
#include "cmll/metrics.hpp"

namespace cmll {

enum class LearnerChoice { automatic, ridge, kernel_ridge };

struct ExperimentConfig {
  Method method = Method::cmll;
  double mu = 0.5;  // d / D
  double nu = 0.5;  // m / M
  double alpha = 1.0;
  double lambda = 0.0;
  double rho = 1e-3;  // learner regularization
  double delta = 0.5;
  double tol = 1e-5;
  std::size_t maxc = 50;
  std::size_t folds = 5;
  std::size_t top_k = 3;
  std::uint64_t seed = 0;
  KernelSpec kernel = KernelSpec::rbf_median();          // kcmll embedding kernel
  LearnerChoice learner = LearnerChoice::automatic;      // kernel ridge for kcmll, ridge otherwise
  KernelSpec learner_kernel = KernelSpec::rbf_median();  // used by kernel ridge
  std::optional<double> metric_ridge;
  bool standardize = false;
  std::size_t threads = 1;  // folds evaluated concurrently

  double beta() const { return alpha * (1.0 + lambda); }
};

void validate_config(const ExperimentConfig& cfg);

/// Embedding parameters for `cfg` on a training split of the given shape.
CmllParams params_for(const ExperimentConfig& cfg, std::size_t instances, std::size_t features,
                      std::size_t labels);

/// Standardizer, embedding and learner, all fitted on `train` only.
Pipeline fit_pipeline(const Dataset& train, const ExperimentConfig& cfg);

struct FoldMetrics {
  std::size_t fold = 0;
  std::vector<std::pair<std::string, std::optional<double>>> values;
};

/// Per-fold metric values of a cross-validation run, in fold order.
std::vector<FoldMetrics> cross_validate_folds(const Dataset& data, const ExperimentConfig& cfg);

/// Mean and sample standard deviation of every metric over folds. Folds where a metric
/// is undefined are dropped from that metric with a warning.
EvalReport aggregate_folds(const std::vector<FoldMetrics>& folds);

EvalReport cross_validate(const Dataset& data, const ExperimentConfig& cfg);

/// Scan values 0.1, 0.2, ..., 1.0.
std::vector<double> ratio_scan_values();

struct RatioScan {
  std::vector<double> ratios;
  std::vector<EvalReport> reports;
};

struct RatioSearchResult {
  std::string metric;
  double mu_star = 0.0;
  double nu_star = 0.0;
  RatioScan mu_scan;  // at nu = nu0
  RatioScan nu_scan;  // at mu = mu_star
};

/// Scans mu at fixed nu0, locks the best mu, then scans nu. Ties keep the smaller ratio.
RatioSearchResult ratio_grid_search(const Dataset& data, const ExperimentConfig& base, double nu0,
                                    const std::string& metric);

struct GridCell {
  double mu = 0.0;
  double nu = 0.0;
  EvalReport report;
};

/// All 100 (mu, nu) pairs, mu-major.
std::vector<GridCell> full_ratio_grid(const Dataset& data, const ExperimentConfig& base);

struct SensitivityPoint {
  double alpha = 0.0;
  double beta = 0.0;
  double dep = 0.0;
  double rec = 0.0;
  double dep_norm = 0.0;  // clamped to [0, 1]
  double rec_norm = 0.0;
  double dep_norm_raw = 0.0;
  double rec_norm_raw = 0.0;
  std::optional<EvalReport> metrics;
};

struct SensitivityReport {
  std::vector<SensitivityPoint> points;
  double dep_min = 0.0;
  double dep_max = 0.0;
  double rec_min = 0.0;
  double rec_max = 0.0;
  std::vector<std::string> warnings;
};

/// dep = tr[V^t Xc P P^t Xc^t V] and rec = tr[V^t Y Y^t V] of full-data fits for each
/// alpha, normalized against the dependence-only and recovery-only solutions. With
/// `with_metrics` each alpha also gets a cross-validated report.
SensitivityReport alpha_sensitivity(const Dataset& data, const ExperimentConfig& base,
                                    const std::vector<double>& alphas, bool with_metrics = true);

/// Runs fn(0), ..., fn(count - 1) on up to `threads` workers. The first exception by
/// index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace cmll
