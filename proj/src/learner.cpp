#include "cmll/learner.hpp"

#include <cmath>
#include <cstring>
#include <string>

#include "cmll/error.hpp"

namespace cmll {

Regressor ridge_fit(const Matrix& u, const Matrix& v, double rho) {
  if (u.rows() != v.rows()) throw InvalidInput("ridge_fit: U and V row counts differ");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidInput("ridge_fit: rho must be >= 0");
  auto [uc, umeans] = center_columns(u);
  auto [vc, vmeans] = center_columns(v);

  Matrix system = gram(uc);
  for (std::size_t i = 0; i < system.rows(); ++i) system(i, i) += rho;
  Regressor reg;
  reg.kind = RegressorKind::ridge;
  try {
    reg.coef = solve_spd(system, matmul_tn(uc, vc));
  } catch (const NumericError& e) {
    throw NumericError(std::string("ridge_fit: singular normal equations (") + e.what() +
                           "); use rho > 0",
                       e.pivot());
  }
  reg.input_means = std::move(umeans);
  reg.target_means = std::move(vmeans);
  reg.rho = rho;
  return reg;
}

namespace {

// Centers test kernel rows against the training kernel statistics.
Matrix center_test_kernel(const Matrix& k, const std::vector<double>& col_means, double grand_mean) {
  Matrix out = subtract_row_vector(k, col_means);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = k.row(i);
    double mean = 0.0;
    for (double x : row) mean += x;
    mean /= static_cast<double>(row.size());
    for (double& x : out.row(i)) x += grand_mean - mean;
  }
  return out;
}

}  // namespace

Regressor kridge_fit(const Matrix& u, const Matrix& v, double rho, const KernelSpec& spec,
                     std::uint64_t seed) {
  if (u.rows() != v.rows()) throw InvalidInput("kridge_fit: U and V row counts differ");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw InvalidInput("kridge_fit: rho must be >= 0");
  const std::size_t n = u.rows();

  Regressor reg;
  reg.kind = RegressorKind::kernel_ridge;
  reg.spec = resolve_kernel(spec, u, seed);
  const Matrix k = kernel_matrix(reg.spec, u, u);
  reg.kernel_col_means = column_means(k);
  double grand = 0.0;
  for (double m : reg.kernel_col_means) grand += m;
  reg.kernel_grand_mean = grand / static_cast<double>(n);

  Matrix system = center_test_kernel(k, reg.kernel_col_means, reg.kernel_grand_mean);
  system = symmetrized(system);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) system(i, j) += inv_n;
    system(i, i) += rho;
  }

  auto [vc, vmeans] = center_columns(v);
  try {
    reg.coef = solve_spd(system, vc);
  } catch (const NumericError& e) {
    throw NumericError(std::string("kridge_fit: singular kernel system (") + e.what() +
                           "); use rho > 0",
                       e.pivot());
  }
  reg.target_means = std::move(vmeans);
  reg.input_means = column_means(u);
  reg.U_train = u;
  reg.rho = rho;
  return reg;
}

Matrix predict(const Regressor& reg, const Matrix& u) {
  Matrix out;
  if (reg.kind == RegressorKind::ridge) {
    if (u.cols() != reg.coef.rows()) throw InvalidInput("predict: input dimension mismatch");
    out = matmul(subtract_row_vector(u, reg.input_means), reg.coef);
  } else {
    if (u.cols() != reg.U_train.cols()) throw InvalidInput("predict: input dimension mismatch");
    const Matrix k = kernel_matrix(reg.spec, u, reg.U_train);
    out = matmul(center_test_kernel(k, reg.kernel_col_means, reg.kernel_grand_mean), reg.coef);
  }
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += reg.target_means[j];
  }
  return out;
}

std::string_view method_name(Method m) {
  switch (m) {
    case Method::cmll: return "cmll";
    case Method::kcmll: return "kcmll";
    case Method::cmll_y: return "cmll_y";
    case Method::mddm: return "mddm";
    case Method::ori: return "ori";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::cmll, Method::kcmll, Method::cmll_y, Method::mddm, Method::ori}) {
    if (method_name(m) == name) return m;
  }
  throw InvalidInput("unknown method '" + std::string(name) + "'");
}

Standardizer fit_standardizer(const Matrix& x) {
  Standardizer s;
  s.enabled = true;
  s.means = column_means(x);
  s.scales.assign(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double dev = x(i, j) - s.means[j];
      s.scales[j] += dev * dev;
    }
  }
  for (double& sc : s.scales) {
    sc = std::sqrt(sc / static_cast<double>(x.rows()));
    if (!(sc > 0.0)) sc = 1.0;
  }
  return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
  if (!s.enabled) return x;
  if (x.cols() != s.means.size()) throw InvalidInput("standardizer: feature count mismatch");
  Matrix out = subtract_row_vector(x, s.means);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] /= s.scales[j];
  }
  return out;
}

std::uint64_t dataset_fingerprint(const Dataset& data) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* p, std::size_t bytes) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < bytes; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::size_t dims[3] = {data.X.rows(), data.X.cols(), data.Y.cols()};
  mix(dims, sizeof dims);
  mix(data.X.data(), data.X.size() * sizeof(double));
  mix(data.Y.data(), data.Y.size() * sizeof(double));
  return h;
}

Matrix embed(const Pipeline& pipe, const Matrix& x) {
  Matrix xs = apply_standardizer(pipe.standardizer, x);
  if (const auto* lin = std::get_if<CmllModel>(&pipe.embedding)) return encode_features(*lin, xs);
  if (const auto* ker = std::get_if<KcmllModel>(&pipe.embedding)) return kernel_project(*ker, xs);
  return xs;
}

Matrix predict_scores(const Pipeline& pipe, const Matrix& x) {
  const Matrix out = predict(pipe.regressor, embed(pipe, x));
  if (const auto* lin = std::get_if<CmllModel>(&pipe.embedding)) return matmul(out, lin->W);
  if (const auto* ker = std::get_if<KcmllModel>(&pipe.embedding)) return matmul(out, ker->W);
  return out;
}

Matrix binarize(const Matrix& scores, double delta) {
  Matrix out(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < scores.size(); ++i) out.data()[i] = scores.data()[i] > delta ? 1.0 : 0.0;
  return out;
}

}  // namespace cmll
