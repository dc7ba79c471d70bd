#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "cmll/cmll.hpp"
#include "cmll/kcmll.hpp"
#include "cmll/kernel.hpp"

namespace cmll {

enum class RegressorKind { ridge, kernel_ridge };

/// Multi-output regression U -> V with an intercept absorbed by centering.
struct Regressor {
  RegressorKind kind = RegressorKind::ridge;
  Matrix coef;  // ridge: d x m primal weights; kernel ridge: N x m dual coefficients
  std::vector<double> input_means;
  std::vector<double> target_means;
  double rho = 0.0;
  // kernel ridge only
  KernelSpec spec;
  Matrix U_train;
  std::vector<double> kernel_col_means;
  double kernel_grand_mean = 0.0;
};

/// Solves (Uc^t Uc + rho I) coef = Uc^t Vc. A singular system raises NumericError.
Regressor ridge_fit(const Matrix& u, const Matrix& v, double rho);

/// Dual ridge on the double-centered kernel Kc: (Kc + rho I + e e^t / N) coef = Vc.
/// The e e^t / N term only acts on the constant direction, which Vc is orthogonal to,
/// so the solution equals (Kc + rho I)^-1 Vc whenever that inverse exists.
Regressor kridge_fit(const Matrix& u, const Matrix& v, double rho, const KernelSpec& spec,
                     std::uint64_t seed = 0);

Matrix predict(const Regressor& reg, const Matrix& u);

enum class Method { cmll, kcmll, cmll_y, mddm, ori };
std::string_view method_name(Method m);
Method parse_method(std::string_view name);

/// Per-feature affine map applied before any embedding.
struct Standardizer {
  bool enabled = false;
  std::vector<double> means;
  std::vector<double> scales;
};

/// Fits means and standard deviations on `x`; constant columns keep scale 1.
Standardizer fit_standardizer(const Matrix& x);
Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

using Embedding = std::variant<std::monostate, CmllModel, KcmllModel>;

struct Pipeline {
  Method method = Method::ori;
  Standardizer standardizer;
  Embedding embedding;
  Regressor regressor;
  double delta = 0.5;
  std::uint64_t train_fingerprint = 0;  // hash of the training split
};

/// FNV-1a over the bytes of X and Y.
std::uint64_t dataset_fingerprint(const Dataset& data);

/// Features after standardization and embedding, i.e. the regressor input.
Matrix embed(const Pipeline& pipe, const Matrix& x);

/// Scores before thresholding: regressor output decoded through W when an embedding
/// provides one, raw regressor output otherwise.
Matrix predict_scores(const Pipeline& pipe, const Matrix& x);

/// 1 where score > delta.
Matrix binarize(const Matrix& scores, double delta);

}  // namespace cmll
