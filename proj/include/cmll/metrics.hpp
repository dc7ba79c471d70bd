#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmll/dataset.hpp"
#include "cmll/matrix.hpp"

namespace cmll {

struct Pipeline;

// Ranking metrics order labels by descending score, ascending label index on ties, and
// skip instances without relevant labels. Each throws UndefinedMetric when no instance
// is usable.

double average_precision(const Matrix& y, const Matrix& s);
/// Mean fraction of (relevant, irrelevant) pairs ordered wrongly; ties count 1/2.
/// Instances whose labels are all relevant have no pairs and are skipped too.
double ranking_loss(const Matrix& y, const Matrix& s);
double one_error(const Matrix& y, const Matrix& s);
/// Mean |top-k ∩ relevant| / k over all instances.
double precision_at_k(const Matrix& y, const Matrix& s, std::size_t k);
double ndcg_at_k(const Matrix& y, const Matrix& s, std::size_t k);
/// 2TP / (2TP + FP + FN) pooled over all cells; UndefinedMetric when the denominator is 0.
double micro_f1(const Matrix& y, const Matrix& yhat);

/// Label indices sorted by descending score, ascending index on ties.
std::vector<std::size_t> rank_labels(std::span<const double> scores);

inline constexpr std::string_view kMetricNames[] = {
    "average_precision", "micro_f1", "ranking_loss", "one_error", "precision_at_k", "ndcg_at_k"};

/// True for metrics where smaller is better.
bool lower_is_better(std::string_view metric);

/// Every metric on one split; undefined metrics are empty.
std::vector<std::pair<std::string, std::optional<double>>> evaluate_all(
    const Matrix& y, const Matrix& scores, double delta, std::size_t k = 3);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation across folds
  std::size_t count = 0;
};

struct EvalReport {
  std::vector<MetricSummary> metrics;
  std::vector<std::string> warnings;

  /// Throws InvalidInput for an unknown name.
  const MetricSummary& get(std::string_view name) const;
};

struct Theorem1Result {
  std::size_t n_mis = 0;
  double tau = 0.0;
  double squared_error = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// n_mis counts labels where (yhat_i >= delta) disagrees with y_i;
/// bound = max(1/delta^2, 1/(1-delta)^2) * |yhat - y|^2.
Theorem1Result theorem1_bound(std::span<const double> y, std::span<const double> yhat, double delta);

struct BoundRow {
  std::string strategy;
  std::vector<double> z;            // per test instance
  std::vector<std::size_t> n_mis;   // per test instance
  double mean_z = 0.0;
  double mean_n_mis = 0.0;
};

/// Realized misclassification bounds of several pipelines on one test split. All pipelines must
/// have been fitted on the same training split.
std::vector<BoundRow> bound_diagnostics(
    const std::vector<std::pair<std::string, const Pipeline*>>& pipelines, const Dataset& test,
    double delta);

}  // namespace cmll
