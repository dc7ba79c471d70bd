#include "cmll/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cmath>
#include <exception>
#include <thread>

#include "cmll/cmll.hpp"
#include "cmll/error.hpp"
#include "cmll/kcmll.hpp"
#include "cmll/subspace.hpp"

namespace cmll {

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.mu > 0.0 && cfg.mu <= 1.0)) throw InvalidInput("mu must lie in (0, 1]");
  if (!(cfg.nu > 0.0 && cfg.nu <= 1.0)) throw InvalidInput("nu must lie in (0, 1]");
  if (!(cfg.alpha >= 0.0) || !std::isfinite(cfg.alpha)) throw InvalidInput("alpha must be >= 0");
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) throw InvalidInput("lambda must be >= 0");
  if (!(cfg.rho >= 0.0) || !std::isfinite(cfg.rho)) throw InvalidInput("rho must be >= 0");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
  if (!(cfg.tol > 0.0)) throw InvalidInput("tol must be positive");
  if (cfg.maxc < 1) throw InvalidInput("maxc must be at least 1");
  if (cfg.folds < 2) throw InvalidInput("folds must be at least 2");
  if (cfg.top_k < 1) throw InvalidInput("k must be at least 1");
}

CmllParams params_for(const ExperimentConfig& cfg, std::size_t instances, std::size_t features,
                      std::size_t labels) {
  CmllParams p;
  p.beta = cfg.beta();
  p.lambda = cfg.lambda;
  p.maxc = cfg.maxc;
  p.tol = cfg.tol;
  p.seed = cfg.seed;
  p.m = dimension_from_ratio(cfg.nu, labels);
  p.d = dimension_from_ratio(cfg.mu, features);
  switch (cfg.method) {
    case Method::cmll_y: p.d = features; break;
    case Method::mddm: p.m = labels; break;
    case Method::kcmll: p.d = std::min(p.d, instances); break;
    default: break;
  }
  return p;
}

Pipeline fit_pipeline(const Dataset& train, const ExperimentConfig& cfg) {
  validate_config(cfg);
  validate_dataset(train);
  Pipeline pipe;
  pipe.method = cfg.method;
  pipe.delta = cfg.delta;
  pipe.train_fingerprint = dataset_fingerprint(train);

  Dataset data = train;
  if (cfg.standardize) {
    pipe.standardizer = fit_standardizer(train.X);
    data.X = apply_standardizer(pipe.standardizer, train.X);
  }
  const CmllParams params = params_for(cfg, data.instances(), data.features(), data.labels());

  Matrix targets;
  switch (cfg.method) {
    case Method::cmll: {
      CmllModel model = fit_cmll(data, params);
      targets = model.V;
      pipe.embedding = std::move(model);
      break;
    }
    case Method::cmll_y: {
      CmllModel model = fit_cmll_y(data, params);
      targets = model.V;
      pipe.embedding = std::move(model);
      break;
    }
    case Method::mddm: {
      CmllModel model = fit_mddm(data, params);
      targets = model.V;
      pipe.embedding = std::move(model);
      break;
    }
    case Method::kcmll: {
      KcmllOptions options;
      options.metric_ridge = cfg.metric_ridge;
      KcmllModel model = fit_kcmll(data, cfg.kernel, params, options);
      targets = model.V;
      pipe.embedding = std::move(model);
      break;
    }
    case Method::ori:
      targets = data.Y;
      break;
  }

  // The embedding saw standardized features; embed() applies the same map.
  Pipeline view = pipe;
  view.standardizer = Standardizer{};
  const Matrix u = embed(view, data.X);

  const bool kernel_learner = cfg.learner == LearnerChoice::kernel_ridge ||
                              (cfg.learner == LearnerChoice::automatic && cfg.method == Method::kcmll);
  pipe.regressor = kernel_learner ? kridge_fit(u, targets, cfg.rho, cfg.learner_kernel, cfg.seed)
                                  : ridge_fit(u, targets, cfg.rho);
  return pipe;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::min(std::max<std::size_t>(threads, 1), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<FoldMetrics> cross_validate_folds(const Dataset& data, const ExperimentConfig& cfg) {
  validate_config(cfg);
  validate_dataset(data);
  const FoldPlan plan = split_folds(data.instances(), cfg.folds, cfg.seed);
  std::vector<FoldMetrics> results(cfg.folds);
  parallel_for(cfg.folds, cfg.threads, [&](std::size_t fold) {
    const auto train_rows = plan.train_indices(fold);
    const auto test_rows = plan.test_indices(fold);
    const Dataset train = subset(data, train_rows);
    const Dataset test = subset(data, test_rows);
    const Pipeline pipe = fit_pipeline(train, cfg);
    const Matrix scores = predict_scores(pipe, test.X);
    results[fold] = FoldMetrics{fold, evaluate_all(test.Y, scores, cfg.delta, cfg.top_k)};
  });
  return results;
}

EvalReport aggregate_folds(const std::vector<FoldMetrics>& folds) {
  EvalReport report;
  for (std::string_view name : kMetricNames) {
    std::vector<double> values;
    for (const auto& f : folds) {
      for (const auto& [metric, value] : f.values) {
        if (metric != name) continue;
        if (value) {
          values.push_back(*value);
        } else {
          report.warnings.push_back(std::string(name) + " undefined on fold " + std::to_string(f.fold) +
                                    "; excluded from the average");
        }
      }
    }
    MetricSummary s;
    s.name = std::string(name);
    s.count = values.size();
    if (!values.empty()) {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(values.size());
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
    } else {
      s.mean = std::nan("");
      s.std = std::nan("");
    }
    report.metrics.push_back(std::move(s));
  }
  return report;
}

EvalReport cross_validate(const Dataset& data, const ExperimentConfig& cfg) {
  return aggregate_folds(cross_validate_folds(data, cfg));
}

std::vector<double> ratio_scan_values() {
  std::vector<double> out;
  for (int k = 1; k <= 10; ++k) out.push_back(static_cast<double>(k) / 10.0);
  return out;
}

namespace {

// Metric value used for ranking a scan cell; undefined metrics rank last.
double score_of(const EvalReport& r, const std::string& metric) {
  const MetricSummary& s = r.get(metric);
  if (s.count == 0 || !std::isfinite(s.mean)) return lower_is_better(metric) ? INFINITY : -INFINITY;
  return s.mean;
}

std::size_t best_index(const std::vector<EvalReport>& reports, const std::string& metric) {
  const bool lower = lower_is_better(metric);
  std::size_t best = 0;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    const double a = score_of(reports[i], metric);
    const double b = score_of(reports[best], metric);
    if (lower ? a < b : a > b) best = i;
  }
  return best;
}

}  // namespace

RatioSearchResult ratio_grid_search(const Dataset& data, const ExperimentConfig& base, double nu0,
                                    const std::string& metric) {
  const auto grid = ratio_scan_values();
  if (std::none_of(grid.begin(), grid.end(), [&](double g) { return std::abs(g - nu0) < 1e-12; })) {
    throw InvalidInput("nu0 must be one of 0.1, 0.2, ..., 1.0");
  }
  if (std::find(std::begin(kMetricNames), std::end(kMetricNames), metric) == std::end(kMetricNames)) {
    throw InvalidInput("unknown metric '" + metric + "'");
  }
  RatioSearchResult out;
  out.metric = metric;

  ExperimentConfig cfg = base;
  cfg.nu = nu0;
  for (double mu : grid) {
    cfg.mu = mu;
    out.mu_scan.ratios.push_back(mu);
    out.mu_scan.reports.push_back(cross_validate(data, cfg));
  }
  out.mu_star = grid[best_index(out.mu_scan.reports, metric)];

  cfg.mu = out.mu_star;
  for (double nu : grid) {
    cfg.nu = nu;
    out.nu_scan.ratios.push_back(nu);
    out.nu_scan.reports.push_back(cross_validate(data, cfg));
  }
  out.nu_star = grid[best_index(out.nu_scan.reports, metric)];
  return out;
}

std::vector<GridCell> full_ratio_grid(const Dataset& data, const ExperimentConfig& base) {
  std::vector<GridCell> cells;
  ExperimentConfig cfg = base;
  for (double mu : ratio_scan_values()) {
    for (double nu : ratio_scan_values()) {
      cfg.mu = mu;
      cfg.nu = nu;
      cells.push_back(GridCell{mu, nu, cross_validate(data, cfg)});
    }
  }
  return cells;
}

namespace {

double normalize(double value, double lo, double hi, const char* what, double alpha,
                 std::vector<std::string>& warnings, double& raw) {
  const double span = hi - lo;
  if (!(span > 0.0)) {
    warnings.push_back(std::string(what) + " anchors coincide; normalized value set to 0");
    raw = 0.0;
    return 0.0;
  }
  raw = (value - lo) / span;
  if (raw < -1e-6 || raw > 1.0 + 1e-6) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s' = %.6g at alpha %.6g lies outside [0, 1]; clamped", what, raw, alpha);
    warnings.emplace_back(buf);
  }
  return std::clamp(raw, 0.0, 1.0);
}

}  // namespace

SensitivityReport alpha_sensitivity(const Dataset& data, const ExperimentConfig& base,
                                    const std::vector<double>& alphas, bool with_metrics) {
  validate_config(base);
  validate_dataset(data);
  for (double a : alphas) {
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("alphas must be positive");
  }
  ExperimentConfig cfg = base;
  cfg.method = Method::cmll;

  Dataset full = data;
  if (cfg.standardize) full.X = apply_standardizer(fit_standardizer(data.X), data.X);
  const Matrix xc = center_columns(full.X).centered;
  const Matrix z = xc.transpose();
  CmllParams params = params_for(cfg, full.instances(), full.features(), full.labels());

  SensitivityReport report;
  {
    const AlternationResult dep_only = alternate(z, full.Y, initial_projection(full.features(), params.d, params.seed),
                                                 {1.0, 0.0}, params.m, params.maxc, params.tol);
    report.dep_max = dependence_term(dep_only.v, dep_only.u, xc);
    report.rec_min = recovery_term(dep_only.v, full.Y);

    const Matrix v = alternation_v_step(xc, full.Y, {0.0, 1.0}, params.m);
    const Matrix p = alternation_u_step(z, v, params.d);
    report.dep_min = dependence_term(v, p, xc);
    report.rec_max = recovery_term(v, full.Y);
  }

  for (double alpha : alphas) {
    SensitivityPoint pt;
    pt.alpha = alpha;
    pt.beta = alpha * (1.0 + cfg.lambda);
    params.beta = pt.beta;
    const CmllModel model = fit_cmll(full, params);
    pt.dep = dependence_term(model.V, model.P, xc);
    pt.rec = recovery_term(model.V, full.Y);
    pt.dep_norm = normalize(pt.dep, report.dep_min, report.dep_max, "dep", alpha, report.warnings, pt.dep_norm_raw);
    pt.rec_norm = normalize(pt.rec, report.rec_min, report.rec_max, "rec", alpha, report.warnings, pt.rec_norm_raw);
    if (with_metrics) {
      ExperimentConfig point_cfg = cfg;
      point_cfg.alpha = alpha;
      pt.metrics = cross_validate(data, point_cfg);
    }
    report.points.push_back(std::move(pt));
  }
  return report;
}

}  // namespace cmll
