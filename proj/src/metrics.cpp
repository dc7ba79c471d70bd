#include "cmll/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmll/error.hpp"
#include "cmll/learner.hpp"

namespace cmll {

namespace {

void require_same_shape(const Matrix& y, const Matrix& s, const char* who) {
  if (y.rows() != s.rows() || y.cols() != s.cols()) {
    throw InvalidInput(std::string(who) + ": label and score shapes differ");
  }
}

// Neumaier summation; keeps the averages independent of instance count effects.
class Accumulator {
 public:
  void add(double x) {
    const double t = sum_ + x;
    comp_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
    sum_ = t;
    ++count_;
  }
  std::size_t count() const { return count_; }
  double mean(const char* who) const {
    if (count_ == 0) throw UndefinedMetric(std::string(who) + ": no instance qualifies (empty label sets are skipped)");
    return (sum_ + comp_) / static_cast<double>(count_);
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t count_ = 0;
};

std::size_t relevant_count(std::span<const double> y) {
  return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1.0));
}

}  // namespace

std::vector<std::size_t> rank_labels(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

double average_precision(const Matrix& y, const Matrix& s) {
  require_same_shape(y, s, "average_precision");
  Accumulator acc;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yi = y.row(i);
    const std::size_t rel = relevant_count(yi);
    if (rel == 0) continue;
    const auto order = rank_labels(s.row(i));
    double total = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (yi[order[r]] != 1.0) continue;
      ++hits;
      total += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    acc.add(total / static_cast<double>(rel));
  }
  return acc.mean("average_precision");
}

double ranking_loss(const Matrix& y, const Matrix& s) {
  require_same_shape(y, s, "ranking_loss");
  Accumulator acc;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yi = y.row(i);
    const auto si = s.row(i);
    const std::size_t rel = relevant_count(yi);
    if (rel == 0 || rel == yi.size()) continue;
    // Walk labels from lowest score upward; for each relevant label count irrelevant
    // labels scored strictly higher plus half of those tied.
    std::vector<std::size_t> order(yi.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return si[a] < si[b]; });
    const std::size_t irr = yi.size() - rel;
    double bad = 0.0;
    std::size_t irrelevant_below = 0;
    for (std::size_t p = 0; p < order.size();) {
      std::size_t q = p;
      std::size_t tie_rel = 0, tie_irr = 0;
      while (q < order.size() && si[order[q]] == si[order[p]]) {
        (yi[order[q]] == 1.0 ? tie_rel : tie_irr) += 1;
        ++q;
      }
      const std::size_t irrelevant_above = irr - irrelevant_below - tie_irr;
      bad += static_cast<double>(tie_rel) *
             (static_cast<double>(irrelevant_above) + 0.5 * static_cast<double>(tie_irr));
      irrelevant_below += tie_irr;
      p = q;
    }
    acc.add(bad / (static_cast<double>(rel) * static_cast<double>(irr)));
  }
  return acc.mean("ranking_loss");
}

double one_error(const Matrix& y, const Matrix& s) {
  require_same_shape(y, s, "one_error");
  Accumulator acc;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yi = y.row(i);
    if (relevant_count(yi) == 0) continue;
    const auto si = s.row(i);
    const std::size_t top = static_cast<std::size_t>(std::max_element(si.begin(), si.end(),
                                                                       [](double a, double b) { return a < b; }) -
                                                      si.begin());
    acc.add(yi[top] == 1.0 ? 0.0 : 1.0);
  }
  return acc.mean("one_error");
}

double precision_at_k(const Matrix& y, const Matrix& s, std::size_t k) {
  require_same_shape(y, s, "precision_at_k");
  if (k == 0) throw InvalidInput("precision_at_k: k must be positive");
  Accumulator acc;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yi = y.row(i);
    const auto order = rank_labels(s.row(i));
    std::size_t hits = 0;
    for (std::size_t r = 0; r < std::min(k, order.size()); ++r) hits += yi[order[r]] == 1.0;
    acc.add(static_cast<double>(hits) / static_cast<double>(k));
  }
  if (acc.count() == 0) throw UndefinedMetric("precision_at_k: no instances");
  return acc.mean("precision_at_k");
}

double ndcg_at_k(const Matrix& y, const Matrix& s, std::size_t k) {
  require_same_shape(y, s, "ndcg_at_k");
  if (k == 0) throw InvalidInput("ndcg_at_k: k must be positive");
  Accumulator acc;
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto yi = y.row(i);
    const std::size_t rel = relevant_count(yi);
    if (rel == 0) continue;
    const auto order = rank_labels(s.row(i));
    const std::size_t depth = std::min(k, order.size());
    double dcg = 0.0, ideal = 0.0;
    for (std::size_t r = 0; r < depth; ++r) {
      const double discount = 1.0 / std::log2(static_cast<double>(r) + 2.0);
      if (yi[order[r]] == 1.0) dcg += discount;
      if (r < rel) ideal += discount;
    }
    acc.add(dcg / ideal);
  }
  return acc.mean("ndcg_at_k");
}

double micro_f1(const Matrix& y, const Matrix& yhat) {
  require_same_shape(y, yhat, "micro_f1");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const bool truth = y.data()[i] == 1.0;
    const bool pred = yhat.data()[i] == 1.0;
    tp += truth && pred;
    fp += !truth && pred;
    fn += truth && !pred;
  }
  const std::size_t denom = 2 * tp + fp + fn;
  if (denom == 0) throw UndefinedMetric("micro_f1: no positive labels or predictions");
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

bool lower_is_better(std::string_view metric) {
  return metric == "ranking_loss" || metric == "one_error";
}

std::vector<std::pair<std::string, std::optional<double>>> evaluate_all(const Matrix& y,
                                                                       const Matrix& scores,
                                                                       double delta, std::size_t k) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  auto attempt = [&](std::string_view name, auto&& fn) {
    std::optional<double> value;
    try {
      value = fn();
    } catch (const UndefinedMetric&) {
    }
    out.emplace_back(std::string(name), value);
  };
  attempt("average_precision", [&] { return average_precision(y, scores); });
  attempt("micro_f1", [&] { return micro_f1(y, binarize(scores, delta)); });
  attempt("ranking_loss", [&] { return ranking_loss(y, scores); });
  attempt("one_error", [&] { return one_error(y, scores); });
  attempt("precision_at_k", [&] { return precision_at_k(y, scores, k); });
  attempt("ndcg_at_k", [&] { return ndcg_at_k(y, scores, k); });
  return out;
}

const MetricSummary& EvalReport::get(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return m;
  }
  throw InvalidInput("unknown metric '" + std::string(name) + "'");
}

Theorem1Result theorem1_bound(std::span<const double> y, std::span<const double> yhat, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("theorem1_bound: delta must lie in (0, 1)");
  if (y.size() != yhat.size()) throw InvalidInput("theorem1_bound: length mismatch");
  Theorem1Result r;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw InvalidInput("theorem1_bound: y must be binary");
    const bool predicted = yhat[i] >= delta;
    if (predicted != (y[i] == 1.0)) ++r.n_mis;
    const double diff = yhat[i] - y[i];
    r.squared_error += diff * diff;
  }
  r.tau = std::max(1.0 / (delta * delta), 1.0 / ((1.0 - delta) * (1.0 - delta)));
  r.bound = r.tau * r.squared_error;
  r.holds = static_cast<double>(r.n_mis) <= r.bound;
  return r;
}

std::vector<BoundRow> bound_diagnostics(
    const std::vector<std::pair<std::string, const Pipeline*>>& pipelines, const Dataset& test,
    double delta) {
  if (pipelines.empty()) return {};
  const std::uint64_t fp = pipelines.front().second->train_fingerprint;
  for (const auto& [name, pipe] : pipelines) {
    if (pipe->train_fingerprint != fp) {
      throw InvalidInput("bound_diagnostics: pipeline '" + name + "' was fitted on a different split");
    }
  }
  std::vector<BoundRow> rows;
  for (const auto& [name, pipe] : pipelines) {
    const Matrix scores = predict_scores(*pipe, test.X);
    if (scores.cols() != test.Y.cols()) throw InvalidInput("bound_diagnostics: label count mismatch");
    BoundRow row;
    row.strategy = name;
    double zsum = 0.0, msum = 0.0;
    for (std::size_t i = 0; i < test.Y.rows(); ++i) {
      const Theorem1Result r = theorem1_bound(test.Y.row(i), scores.row(i), delta);
      row.z.push_back(r.bound);
      row.n_mis.push_back(r.n_mis);
      zsum += r.bound;
      msum += static_cast<double>(r.n_mis);
    }
    const double n = static_cast<double>(std::max<std::size_t>(test.Y.rows(), 1));
    row.mean_z = zsum / n;
    row.mean_n_mis = msum / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cmll
