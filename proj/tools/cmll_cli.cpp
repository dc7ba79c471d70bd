// Command-line front end for fitting, evaluating and analysing CMLL pipelines.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "cmll/dataset.hpp"
#include "cmll/error.hpp"
#include "cmll/harness.hpp"
#include "cmll/learner.hpp"
#include "cmll/metrics.hpp"
#include "cmll/report.hpp"
#include "cmll/serialize.hpp"
#include "cmll/simd.hpp"
#include "cmll/synthetic.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kNumeric = 4 };

struct Options {
  std::string data;
  std::string test_data;
  std::string model;
  std::string out;
  std::string format = "text";
  std::string method = "cmll";
  std::string kernel = "rbf";
  std::string gamma = "median";
  std::string learner = "auto";
  std::string metric = "average_precision";
  double nu0 = 0.5;
  bool full = false;
  bool no_metrics = false;
  std::vector<double> alphas{1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  cmll::ExperimentConfig cfg;
  cmll::SyntheticSpec synth;
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--data", o.data, "Dataset in the sparse text format")->check(CLI::ExistingFile);
  app->add_option("--method", o.method, "cmll|kcmll|cmll_y|mddm|ori")
      ->check(CLI::IsMember({"cmll", "kcmll", "cmll_y", "mddm", "ori"}));
  app->add_option("--mu", o.cfg.mu, "Feature compression ratio d/D")->check(CLI::Range(0.0, 1.0));
  app->add_option("--nu", o.cfg.nu, "Label compression ratio m/M")->check(CLI::Range(0.0, 1.0));
  app->add_option("--alpha", o.cfg.alpha, "Dependence/recovery balance")->check(CLI::NonNegativeNumber);
  app->add_option("--lambda", o.cfg.lambda, "Decoder ridge")->check(CLI::NonNegativeNumber);
  app->add_option("--rho", o.cfg.rho, "Learner ridge")->check(CLI::NonNegativeNumber);
  app->add_option("--delta", o.cfg.delta, "Binarization threshold")->check(CLI::Range(0.0, 1.0));
  app->add_option("--kernel", o.kernel, "Embedding kernel for kcmll")->check(CLI::IsMember({"linear", "rbf"}));
  app->add_option("--gamma", o.gamma, "RBF bandwidth or 'median'");
  app->add_option("--learner", o.learner, "auto|ridge|kridge")->check(CLI::IsMember({"auto", "ridge", "kridge"}));
  app->add_option("--tol", o.cfg.tol, "Relative convergence tolerance")->check(CLI::PositiveNumber);
  app->add_option("--maxc", o.cfg.maxc, "Maximum alternation sweeps")->check(CLI::PositiveNumber);
  app->add_option("--folds", o.cfg.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  app->add_option("--k", o.cfg.top_k, "Cutoff for precision@k and nDCG@k")->check(CLI::PositiveNumber);
  app->add_option("--seed", o.cfg.seed, "Seed for every random choice");
  app->add_option("--threads", o.cfg.threads, "Folds evaluated concurrently")->check(CLI::PositiveNumber);
  app->add_flag("--standardize", o.cfg.standardize, "Standardize features on the training split");
  app->add_option("--model", o.model, "Model file");
  app->add_option("--out", o.out, "Output path (default stdout)");
  app->add_option("--format", o.format, "text|csv|jsonl")->check(CLI::IsMember({"text", "csv", "jsonl"}));
}

void finalize_config(Options& o) {
  o.cfg.method = cmll::parse_method(o.method);
  cmll::KernelSpec spec = o.kernel == "linear" ? cmll::KernelSpec::linear() : cmll::KernelSpec::rbf_median();
  if (o.gamma != "median") {
    double g = 0.0;
    try {
      std::size_t used = 0;
      g = std::stod(o.gamma, &used);
      if (used != o.gamma.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw cmll::InvalidInput("--gamma expects a number or 'median'");
    }
    if (!(g > 0.0)) throw cmll::InvalidInput("--gamma must be positive");
    if (spec.kind == cmll::KernelKind::rbf) spec.gamma = g;
    o.cfg.learner_kernel = cmll::KernelSpec::rbf(g);
  }
  o.cfg.kernel = spec;
  o.cfg.learner = o.learner == "ridge"    ? cmll::LearnerChoice::ridge
                  : o.learner == "kridge" ? cmll::LearnerChoice::kernel_ridge
                                          : cmll::LearnerChoice::automatic;
  cmll::validate_config(o.cfg);
}

cmll::Dataset require_data(const std::string& path, const char* flag) {
  if (path.empty()) throw cmll::InvalidInput(std::string(flag) + " is required");
  return cmll::load_dataset(path, [](const std::string& w) { std::cerr << "warning: " << w << '\n'; });
}

// Writes to --out or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw cmll::InvalidInput("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

void emit(const Options& o, const cmll::ResultTable& table) {
  Sink sink(o.out);
  cmll::emit_report(sink.stream(), table, cmll::parse_report_format(o.format));
}

int run_fit(Options& o) {
  finalize_config(o);
  if (o.model.empty()) throw cmll::InvalidInput("--model is required");
  const cmll::Dataset data = require_data(o.data, "--data");
  const cmll::Pipeline pipe = cmll::fit_pipeline(data, o.cfg);
  cmll::save_pipeline_file(o.model, pipe);

  cmll::ResultTable t;
  t.columns = {{"sweep"}, {"gamma"}, {"delta"}};
  auto add_trace = [&](double initial, const std::vector<cmll::TraceEntry>& trace) {
    t.rows.push_back({std::int64_t{0}, initial, std::string("-")});
    for (std::size_t i = 0; i < trace.size(); ++i) {
      t.rows.push_back({static_cast<std::int64_t>(i + 1), trace[i].gamma, trace[i].delta});
    }
  };
  if (const auto* lin = std::get_if<cmll::CmllModel>(&pipe.embedding)) add_trace(lin->initial_gamma, lin->trace);
  if (const auto* ker = std::get_if<cmll::KcmllModel>(&pipe.embedding)) add_trace(ker->initial_gamma, ker->trace);
  emit(o, t);
  return kOk;
}

int run_predict(Options& o) {
  if (o.model.empty()) throw cmll::InvalidInput("--model is required");
  const cmll::Pipeline pipe = cmll::load_pipeline_file(o.model);
  const cmll::Dataset data = require_data(o.data, "--data");
  const cmll::Matrix scores = cmll::predict_scores(pipe, data.X);
  const cmll::Matrix labels = cmll::binarize(scores, pipe.delta);

  cmll::ResultTable t;
  t.columns = {{"instance"}, {"labels"}};
  for (std::size_t j = 0; j < scores.cols(); ++j) t.columns.push_back({"s" + std::to_string(j)});
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::string set;
    for (std::size_t j = 0; j < labels.cols(); ++j) {
      if (labels(i, j) == 0.0) continue;
      if (!set.empty()) set += ',';
      set += std::to_string(j);
    }
    std::vector<cmll::Cell> row{static_cast<std::int64_t>(i), set.empty() ? std::string("-") : set};
    for (std::size_t j = 0; j < scores.cols(); ++j) row.emplace_back(scores(i, j));
    t.rows.push_back(std::move(row));
  }
  emit(o, t);
  return kOk;
}

int run_eval(Options& o) {
  if (o.model.empty()) throw cmll::InvalidInput("--model is required");
  const cmll::Pipeline pipe = cmll::load_pipeline_file(o.model);
  const cmll::Dataset data = require_data(o.data, "--data");
  const cmll::Matrix scores = cmll::predict_scores(pipe, data.X);
  const auto report = cmll::aggregate_folds({cmll::FoldMetrics{0, cmll::evaluate_all(data.Y, scores, pipe.delta, o.cfg.top_k)}});
  warn_all(report.warnings);
  emit(o, cmll::eval_table({{std::string(cmll::method_name(pipe.method)), report}}));
  return kOk;
}

int run_cv(Options& o) {
  finalize_config(o);
  const cmll::Dataset data = require_data(o.data, "--data");
  const cmll::EvalReport report = cmll::cross_validate(data, o.cfg);
  warn_all(report.warnings);
  emit(o, cmll::eval_table({{o.method, report}}));
  return kOk;
}

int run_grid(Options& o) {
  finalize_config(o);
  const cmll::Dataset data = require_data(o.data, "--data");
  if (o.full) {
    emit(o, cmll::grid_table(cmll::full_ratio_grid(data, o.cfg)));
    return kOk;
  }
  const auto result = cmll::ratio_grid_search(data, o.cfg, o.nu0, o.metric);
  std::cerr << "selected mu=" << result.mu_star << " nu=" << result.nu_star << " by " << result.metric << '\n';
  emit(o, cmll::ratio_search_table(result));
  return kOk;
}

int run_sensitivity(Options& o) {
  finalize_config(o);
  const cmll::Dataset data = require_data(o.data, "--data");
  const auto report = cmll::alpha_sensitivity(data, o.cfg, o.alphas, !o.no_metrics);
  std::fprintf(stderr, "anchors: dep in [%.6g, %.6g], rec in [%.6g, %.6g]\n", report.dep_min, report.dep_max,
               report.rec_min, report.rec_max);
  warn_all(report.warnings);
  emit(o, cmll::sensitivity_table(report));
  return kOk;
}

int run_bounds(Options& o) {
  finalize_config(o);
  const cmll::Dataset data = require_data(o.data, "--data");
  cmll::Dataset train, test;
  if (!o.test_data.empty()) {
    train = data;
    test = require_data(o.test_data, "--test-data");
  } else {
    const cmll::FoldPlan plan = cmll::split_folds(data.instances(), o.cfg.folds, o.cfg.seed);
    train = cmll::subset(data, plan.train_indices(0));
    test = cmll::subset(data, plan.test_indices(0));
  }
  std::vector<std::pair<std::string, cmll::Method>> strategies{
      {"FE", cmll::Method::mddm}, {"LC", cmll::Method::cmll_y}, {"CL", cmll::Method::cmll}};
  std::vector<cmll::Pipeline> pipes;
  for (const auto& [name, method] : strategies) {
    cmll::ExperimentConfig cfg = o.cfg;
    cfg.method = method;
    pipes.push_back(cmll::fit_pipeline(train, cfg));
  }
  std::vector<std::pair<std::string, const cmll::Pipeline*>> named;
  for (std::size_t i = 0; i < pipes.size(); ++i) named.emplace_back(strategies[i].first, &pipes[i]);
  emit(o, cmll::bounds_table(cmll::bound_diagnostics(named, test, o.cfg.delta)));
  return kOk;
}

int run_synth(Options& o) {
  const cmll::Dataset data = cmll::make_synthetic(o.synth);
  Sink sink(o.out);
  cmll::write_dataset(sink.stream(), data);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact multi-label learning toolkit"};
  app.require_subcommand(1);
  std::string isa;
  app.add_option("--simd", isa, "Force a kernel set: scalar|avx2|neon");

  Options o;
  auto* fit = app.add_subcommand("fit", "Fit a pipeline and save it");
  auto* predict = app.add_subcommand("predict", "Score a dataset with a saved pipeline");
  auto* eval = app.add_subcommand("eval", "Evaluate a saved pipeline on a dataset");
  auto* cv = app.add_subcommand("cv", "Cross-validate a configuration");
  auto* grid = app.add_subcommand("grid", "Compression-ratio search");
  auto* sens = app.add_subcommand("sensitivity", "Dependence/recovery trade-off over alpha");
  auto* bounds = app.add_subcommand("bounds", "Misclassification bound diagnostics");
  auto* synth = app.add_subcommand("synth", "Write a synthetic latent-factor dataset");
  for (auto* sub : {fit, predict, eval, cv, grid, sens, bounds}) add_common(sub, o);

  grid->add_option("--nu0", o.nu0, "Label ratio held fixed during the mu scan");
  grid->add_option("--metric", o.metric, "Selection metric");
  grid->add_flag("--full", o.full, "Evaluate all 100 (mu, nu) pairs");
  sens->add_option("--alphas", o.alphas, "Alpha values")->delimiter(',');
  sens->add_flag("--no-metrics", o.no_metrics, "Skip cross-validated metrics");
  bounds->add_option("--test-data", o.test_data, "Held-out split (default: first fold of --data)")
      ->check(CLI::ExistingFile);

  synth->add_option("--instances", o.synth.instances, "Rows");
  synth->add_option("--latent", o.synth.latent, "Latent dimensions");
  synth->add_option("--noise-dims", o.synth.noise_dims, "Nuisance dimensions");
  synth->add_option("--labels", o.synth.labels, "Labels");
  synth->add_option("--cardinality", o.synth.cardinality, "Expected relevant labels per instance");
  synth->add_option("--noise-scale", o.synth.noise_scale, "Standard deviation of nuisance dimensions");
  synth->add_option("--feature-noise", o.synth.feature_noise, "Additive feature noise");
  synth->add_option("--label-noise", o.synth.label_noise, "Noise on label logits");
  synth->add_option("--seed", o.synth.seed, "Seed");
  synth->add_option("--out", o.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (!isa.empty()) {
      const cmll::simd::Isa want = isa == "scalar" ? cmll::simd::Isa::scalar
                                   : isa == "avx2" ? cmll::simd::Isa::avx2
                                   : isa == "neon" ? cmll::simd::Isa::neon
                                                   : throw cmll::InvalidInput("unknown --simd '" + isa + "'");
      if (!cmll::simd::set_active(want)) throw cmll::InvalidInput("kernel set '" + isa + "' unavailable here");
    }
    if (*fit) return run_fit(o);
    if (*predict) return run_predict(o);
    if (*eval) return run_eval(o);
    if (*cv) return run_cv(o);
    if (*grid) return run_grid(o);
    if (*sens) return run_sensitivity(o);
    if (*bounds) return run_bounds(o);
    if (*synth) return run_synth(o);
  } catch (const cmll::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const cmll::DeserializeError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kParse;
  } catch (const cmll::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const cmll::InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
