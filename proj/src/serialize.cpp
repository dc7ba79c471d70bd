#include "cmll/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cmll/error.hpp"

namespace cmll {

namespace {

constexpr const char* kMagic = "CMLLMDL";

void encode(double x, char* out) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  for (int i = 0; i < 8; ++i) out[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
}

double decode(const char* in) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[i])) << (8 * i);
  double x;
  std::memcpy(&x, &bits, sizeof x);
  return x;
}

std::uint64_t to_uint(const std::string& text, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw DeserializeError("malformed integer for " + what + ": '" + text + "'");
  }
  return v;
}

}  // namespace

void ModelArchive::set_meta(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of(" \n") != std::string::npos || value.find('\n') != std::string::npos) {
    throw InvalidInput("model archive: bad metadata key or value");
  }
  meta_[key] = value;
}

void ModelArchive::set_meta(const std::string& key, std::uint64_t value) {
  set_meta(key, std::to_string(value));
}

void ModelArchive::put(const std::string& name, const Matrix& m) {
  if (!all_finite(m)) throw InvalidInput("model archive: field '" + name + "' is not finite");
  fields_.emplace_back(name, m);
}

void ModelArchive::put(const std::string& name, const std::vector<double>& v) {
  put(name, Matrix(1, v.size(), v));
}

void ModelArchive::put(const std::string& name, double x) { put(name, Matrix(1, 1, x)); }

bool ModelArchive::has_field(const std::string& name) const {
  return std::any_of(fields_.begin(), fields_.end(), [&](const auto& f) { return f.first == name; });
}

const std::string& ModelArchive::meta(const std::string& key) const {
  auto it = meta_.find(key);
  if (it == meta_.end()) throw DeserializeError("model file lacks metadata '" + key + "'");
  return it->second;
}

std::uint64_t ModelArchive::meta_uint(const std::string& key) const { return to_uint(meta(key), key); }

const Matrix& ModelArchive::matrix(const std::string& name) const {
  for (const auto& [n, m] : fields_) {
    if (n == name) return m;
  }
  throw DeserializeError("model file lacks field '" + name + "'");
}

std::vector<double> ModelArchive::vector(const std::string& name) const {
  const Matrix& m = matrix(name);
  if (m.rows() != 1 && m.size() != 0) throw DeserializeError("field '" + name + "' is not a vector");
  return m.values();
}

double ModelArchive::scalar(const std::string& name) const {
  const Matrix& m = matrix(name);
  if (m.rows() != 1 || m.cols() != 1) throw DeserializeError("field '" + name + "' is not a scalar");
  return m(0, 0);
}

void ModelArchive::write(std::ostream& out) const {
  out << kMagic << "\nversion " << kVersion << '\n';
  for (const auto& [k, v] : meta_) out << "meta " << k << ' ' << v << '\n';
  for (const auto& [name, m] : fields_) out << "field " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  out << "payload\n";
  std::vector<char> buf;
  for (const auto& f : fields_) {
    const Matrix& m = f.second;
    buf.resize(m.size() * 8);
    for (std::size_t i = 0; i < m.size(); ++i) encode(m.data()[i], buf.data() + 8 * i);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw InvalidInput("model archive: write failed");
}

ModelArchive ModelArchive::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw DeserializeError("not a model file (bad magic)");
  if (!std::getline(in, line) || line.rfind("version ", 0) != 0) {
    throw DeserializeError("model file lacks a version line");
  }
  if (line.substr(8) != std::to_string(kVersion)) {
    throw VersionError("unsupported model version '" + line.substr(8) + "'");
  }

  ModelArchive ar;
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> layout;
  bool payload = false;
  while (std::getline(in, line)) {
    if (line == "payload") {
      payload = true;
      break;
    }
    if (line.rfind("meta ", 0) == 0) {
      const std::size_t sp = line.find(' ', 5);
      if (sp == std::string::npos) throw DeserializeError("malformed metadata line '" + line + "'");
      ar.meta_[line.substr(5, sp - 5)] = line.substr(sp + 1);
    } else if (line.rfind("field ", 0) == 0) {
      std::istringstream ls(line.substr(6));
      std::string name, rows, cols, extra;
      if (!(ls >> name >> rows >> cols) || (ls >> extra)) {
        throw DeserializeError("malformed field line '" + line + "'");
      }
      layout.push_back({name, {to_uint(rows, name), to_uint(cols, name)}});
    } else {
      throw DeserializeError("unexpected header line '" + line + "'");
    }
  }
  if (!payload) throw DeserializeError("truncated model file: no payload marker");

  char cell[8];
  for (const auto& [name, dims] : layout) {
    const auto [rows, cols] = dims;
    if (cols != 0 && rows > (std::size_t{1} << 40) / cols) {
      throw DeserializeError("field '" + name + "' has implausible dimensions");
    }
    std::vector<double> values;
    values.reserve(std::min<std::size_t>(rows * cols, 1u << 20));
    for (std::size_t i = 0; i < rows * cols; ++i) {
      if (!in.read(cell, 8)) {
        throw DeserializeError("truncated payload: field '" + name + "' declares " + std::to_string(rows) +
                               "x" + std::to_string(cols) + " values");
      }
      values.push_back(decode(cell));
    }
    ar.fields_.emplace_back(name, Matrix(rows, cols, std::move(values)));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DeserializeError("payload longer than the declared fields");
  }
  return ar;
}

namespace {

void put_params(ModelArchive& ar, const std::string& p, const CmllParams& params) {
  ar.put(p + "beta", params.beta);
  ar.put(p + "lambda", params.lambda);
  ar.put(p + "tol", params.tol);
  ar.set_meta(p + "m", params.m);
  ar.set_meta(p + "d", params.d);
  ar.set_meta(p + "maxc", params.maxc);
  ar.set_meta(p + "seed", params.seed);
}

CmllParams get_params(const ModelArchive& ar, const std::string& p) {
  CmllParams params;
  params.beta = ar.scalar(p + "beta");
  params.lambda = ar.scalar(p + "lambda");
  params.tol = ar.scalar(p + "tol");
  params.m = ar.meta_uint(p + "m");
  params.d = ar.meta_uint(p + "d");
  params.maxc = ar.meta_uint(p + "maxc");
  params.seed = ar.meta_uint(p + "seed");
  return params;
}

void put_trace(ModelArchive& ar, const std::string& p, double initial, const std::vector<TraceEntry>& trace,
               bool converged) {
  Matrix t(trace.size(), 2);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    t(i, 0) = trace[i].gamma;
    t(i, 1) = trace[i].delta;
  }
  ar.put(p + "trace", t);
  ar.put(p + "initial_gamma", initial);
  ar.set_meta(p + "converged", converged ? 1 : 0);
}

void get_trace(const ModelArchive& ar, const std::string& p, double& initial, std::vector<TraceEntry>& trace,
               bool& converged) {
  const Matrix& t = ar.matrix(p + "trace");
  if (t.cols() != 2 && t.rows() != 0) throw DeserializeError("trace must have two columns");
  trace.clear();
  for (std::size_t i = 0; i < t.rows(); ++i) trace.push_back({t(i, 0), t(i, 1)});
  initial = ar.scalar(p + "initial_gamma");
  converged = ar.meta_uint(p + "converged") != 0;
}

void put_kernel(ModelArchive& ar, const std::string& p, const KernelSpec& spec) {
  ar.set_meta(p + "kernel", spec.kind == KernelKind::linear ? "linear" : "rbf");
  if (spec.gamma) ar.put(p + "gamma", *spec.gamma);
}

KernelSpec get_kernel(const ModelArchive& ar, const std::string& p) {
  const std::string& kind = ar.meta(p + "kernel");
  if (kind == "linear") return KernelSpec::linear();
  if (kind != "rbf") throw DeserializeError("unknown kernel '" + kind + "'");
  if (!ar.has_field(p + "gamma")) return KernelSpec::rbf_median();
  return KernelSpec::rbf(ar.scalar(p + "gamma"));
}

void put_cmll(ModelArchive& ar, const std::string& p, const CmllModel& m) {
  ar.set_meta(p + "variant", std::string(variant_name(m.variant)));
  put_params(ar, p, m.params);
  ar.put(p + "P", m.P);
  ar.put(p + "V", m.V);
  ar.put(p + "W", m.W);
  ar.put(p + "feature_means", m.feature_means);
  put_trace(ar, p, m.initial_gamma, m.trace, m.converged);
}

CmllModel get_cmll(const ModelArchive& ar, const std::string& p) {
  CmllModel m;
  const std::string& variant = ar.meta(p + "variant");
  if (variant == "cmll") {
    m.variant = CmllVariant::cmll;
  } else if (variant == "cmll_y") {
    m.variant = CmllVariant::cmll_y;
  } else if (variant == "mddm") {
    m.variant = CmllVariant::mddm;
  } else {
    throw DeserializeError("unknown model variant '" + variant + "'");
  }
  m.params = get_params(ar, p);
  m.P = ar.matrix(p + "P");
  m.V = ar.matrix(p + "V");
  m.W = ar.matrix(p + "W");
  m.feature_means = ar.vector(p + "feature_means");
  get_trace(ar, p, m.initial_gamma, m.trace, m.converged);
  if (m.P.rows() != m.feature_means.size() || m.P.cols() != m.params.d || m.V.cols() != m.W.rows()) {
    throw DeserializeError("inconsistent dimensions in linear model");
  }
  return m;
}

void put_kcmll(ModelArchive& ar, const std::string& p, const KcmllModel& m) {
  put_params(ar, p, m.params);
  put_kernel(ar, p, m.spec);
  ar.put(p + "R", m.R);
  ar.put(p + "V", m.V);
  ar.put(p + "W", m.W);
  ar.put(p + "X_train", m.X_train);
  ar.put(p + "kernel_col_means", m.kernel_col_means);
  ar.put(p + "metric_ridge", m.metric_ridge);
  put_trace(ar, p, m.initial_gamma, m.trace, m.converged);
}

KcmllModel get_kcmll(const ModelArchive& ar, const std::string& p) {
  KcmllModel m;
  m.params = get_params(ar, p);
  m.spec = get_kernel(ar, p);
  m.R = ar.matrix(p + "R");
  m.V = ar.matrix(p + "V");
  m.W = ar.matrix(p + "W");
  m.X_train = ar.matrix(p + "X_train");
  m.kernel_col_means = ar.vector(p + "kernel_col_means");
  m.metric_ridge = ar.scalar(p + "metric_ridge");
  get_trace(ar, p, m.initial_gamma, m.trace, m.converged);
  const std::size_t n = m.X_train.rows();
  if (!m.spec.resolved() || m.R.rows() != n || m.kernel_col_means.size() != n || m.R.cols() != m.params.d ||
      m.V.cols() != m.W.rows()) {
    throw DeserializeError("inconsistent dimensions in kernel model");
  }
  return m;
}

void put_regressor(ModelArchive& ar, const std::string& p, const Regressor& r) {
  ar.set_meta(p + "kind", r.kind == RegressorKind::ridge ? "ridge" : "kernel_ridge");
  ar.put(p + "coef", r.coef);
  ar.put(p + "input_means", r.input_means);
  ar.put(p + "target_means", r.target_means);
  ar.put(p + "rho", r.rho);
  if (r.kind == RegressorKind::kernel_ridge) {
    put_kernel(ar, p, r.spec);
    ar.put(p + "U_train", r.U_train);
    ar.put(p + "kernel_col_means", r.kernel_col_means);
    ar.put(p + "kernel_grand_mean", r.kernel_grand_mean);
  }
}

Regressor get_regressor(const ModelArchive& ar, const std::string& p) {
  Regressor r;
  const std::string& kind = ar.meta(p + "kind");
  if (kind == "ridge") {
    r.kind = RegressorKind::ridge;
  } else if (kind == "kernel_ridge") {
    r.kind = RegressorKind::kernel_ridge;
  } else {
    throw DeserializeError("unknown regressor kind '" + kind + "'");
  }
  r.coef = ar.matrix(p + "coef");
  r.input_means = ar.vector(p + "input_means");
  r.target_means = ar.vector(p + "target_means");
  r.rho = ar.scalar(p + "rho");
  if (r.target_means.size() != r.coef.cols()) throw DeserializeError("inconsistent regressor dimensions");
  if (r.kind == RegressorKind::ridge) {
    if (r.input_means.size() != r.coef.rows()) throw DeserializeError("inconsistent regressor dimensions");
  } else {
    r.spec = get_kernel(ar, p);
    r.U_train = ar.matrix(p + "U_train");
    r.kernel_col_means = ar.vector(p + "kernel_col_means");
    r.kernel_grand_mean = ar.scalar(p + "kernel_grand_mean");
    if (r.U_train.rows() != r.coef.rows() || r.kernel_col_means.size() != r.coef.rows() || !r.spec.resolved()) {
      throw DeserializeError("inconsistent regressor dimensions");
    }
  }
  return r;
}

void expect_kind(const ModelArchive& ar, const char* kind) {
  if (ar.meta("kind") != kind) {
    throw DeserializeError("model file holds a '" + ar.meta("kind") + "', expected '" + kind + "'");
  }
}

}  // namespace

void save_model(std::ostream& out, const CmllModel& model) {
  ModelArchive ar;
  ar.set_meta("kind", "cmll_model");
  put_cmll(ar, "", model);
  ar.write(out);
}

void save_model(std::ostream& out, const KcmllModel& model) {
  ModelArchive ar;
  ar.set_meta("kind", "kcmll_model");
  put_kcmll(ar, "", model);
  ar.write(out);
}

void save_model(std::ostream& out, const Pipeline& pipe) {
  ModelArchive ar;
  ar.set_meta("kind", "pipeline");
  ar.set_meta("method", std::string(method_name(pipe.method)));
  ar.set_meta("train_fingerprint", pipe.train_fingerprint);
  ar.put("delta", pipe.delta);
  ar.set_meta("standardize", pipe.standardizer.enabled ? 1 : 0);
  if (pipe.standardizer.enabled) {
    ar.put("std.means", pipe.standardizer.means);
    ar.put("std.scales", pipe.standardizer.scales);
  }
  if (const auto* lin = std::get_if<CmllModel>(&pipe.embedding)) {
    ar.set_meta("embedding", "linear");
    put_cmll(ar, "emb.", *lin);
  } else if (const auto* ker = std::get_if<KcmllModel>(&pipe.embedding)) {
    ar.set_meta("embedding", "kernel");
    put_kcmll(ar, "emb.", *ker);
  } else {
    ar.set_meta("embedding", "none");
  }
  put_regressor(ar, "reg.", pipe.regressor);
  ar.write(out);
}

CmllModel load_cmll_model(std::istream& in) {
  const ModelArchive ar = ModelArchive::read(in);
  expect_kind(ar, "cmll_model");
  return get_cmll(ar, "");
}

KcmllModel load_kcmll_model(std::istream& in) {
  const ModelArchive ar = ModelArchive::read(in);
  expect_kind(ar, "kcmll_model");
  return get_kcmll(ar, "");
}

Pipeline load_pipeline(std::istream& in) {
  const ModelArchive ar = ModelArchive::read(in);
  expect_kind(ar, "pipeline");
  Pipeline pipe;
  try {
    pipe.method = parse_method(ar.meta("method"));
  } catch (const InvalidInput& e) {
    throw DeserializeError(e.what());
  }
  pipe.train_fingerprint = ar.meta_uint("train_fingerprint");
  pipe.delta = ar.scalar("delta");
  if (ar.meta_uint("standardize") != 0) {
    pipe.standardizer.enabled = true;
    pipe.standardizer.means = ar.vector("std.means");
    pipe.standardizer.scales = ar.vector("std.scales");
  }
  const std::string& embedding = ar.meta("embedding");
  if (embedding == "linear") {
    pipe.embedding = get_cmll(ar, "emb.");
  } else if (embedding == "kernel") {
    pipe.embedding = get_kcmll(ar, "emb.");
  } else if (embedding != "none") {
    throw DeserializeError("unknown embedding '" + embedding + "'");
  }
  pipe.regressor = get_regressor(ar, "reg.");
  return pipe;
}

void save_pipeline_file(const std::string& path, const Pipeline& pipe) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write model '" + path + "'");
  save_model(out, pipe);
}

Pipeline load_pipeline_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open model '" + path + "'");
  return load_pipeline(in);
}

}  // namespace cmll
