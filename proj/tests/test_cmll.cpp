#include <doctest.h>

#include <cmath>

#include "cmll/cmll.hpp"
#include "cmll/error.hpp"
#include "cmll/learner.hpp"
#include "test_util.hpp"

using namespace cmll;
using oracle::naive_matmul;
using oracle::naive_transpose;

namespace {

Dataset random_task(std::size_t n, std::size_t dims, std::size_t m, Rng& rng, double p = 0.3) {
  return Dataset{Matrix::gaussian(n, dims, rng), oracle::random_binary(n, m, p, rng), ""};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Projector span check: |V V^t Y - Y|_F
double span_residual(const Matrix& v, const Matrix& y) {
  const Matrix proj = naive_matmul(v, naive_matmul(naive_transpose(v), y));
  return oracle::fro(proj - y);
}

std::size_t numeric_rank(const Matrix& a) {
  const oracle::Eig e = oracle::jacobi_eig(naive_matmul(naive_transpose(a), a));
  std::size_t r = 0;
  for (double v : e.values) r += v > 1e-9 * std::max(1.0, e.values.front());
  return r;
}

}  // namespace

TEST_CASE("objective_gamma examples") {
  Rng rng(1);
  SUBCASE("beta 0 at the top eigenvectors of YY^t") {
    const Matrix y = oracle::random_binary(9, 5, 0.4, rng);
    const oracle::Eig e = oracle::jacobi_eig(naive_matmul(y, naive_transpose(y)));
    const Matrix v = oracle::leading(e.vectors, 2);
    const Matrix xc = oracle::centered(Matrix::gaussian(9, 3, rng));
    const Matrix p = oracle::random_orthonormal(3, 2, rng);
    CHECK(rel(objective_gamma(v, p, xc, y, 0.0), e.values[0] + e.values[1]) <= 1e-10);
  }
  SUBCASE("zero labels") {
    const Matrix xc = oracle::centered(Matrix::gaussian(7, 4, rng));
    const Matrix v = oracle::random_orthonormal(7, 2, rng);
    const Matrix p = oracle::random_orthonormal(4, 3, rng);
    const double g = objective_gamma(v, p, xc, Matrix(7, 3), 2.5);
    const Matrix f = naive_matmul(naive_transpose(naive_matmul(xc, p)), v);
    CHECK(g >= 0.0);
    CHECK(rel(g, 2.5 * std::pow(oracle::fro(f), 2)) <= 1e-12);
  }
  SUBCASE("explicit N x N operator on N = 6") {
    const Matrix xc = oracle::centered(Matrix::gaussian(6, 4, rng));
    const Matrix y = oracle::random_binary(6, 3, 0.5, rng);
    const Matrix v = oracle::random_orthonormal(6, 2, rng);
    const Matrix p = oracle::random_orthonormal(4, 2, rng);
    const double beta = 0.7;
    const Matrix xp = naive_matmul(xc, p);
    Matrix a = naive_matmul(xp, naive_transpose(xp));
    a *= beta;
    a += naive_matmul(y, naive_transpose(y));
    const Matrix vav = naive_matmul(naive_transpose(v), naive_matmul(a, v));
    CHECK(rel(objective_gamma(v, p, xc, y, beta), trace(vav)) <= 1e-10);
    CHECK(rel(dependence_term(v, p, xc) * beta + recovery_term(v, y), trace(vav)) <= 1e-10);
  }
  CHECK_THROWS_AS(objective_gamma(Matrix(5, 2), Matrix(4, 2), Matrix(6, 4), Matrix(6, 3), 1.0), InvalidInput);
}

TEST_CASE("decoder_W examples") {
  const Matrix i2 = Matrix::identity(2);
  CHECK(decoder_W(i2, i2, 0.0) == i2);
  CHECK(decoder_W(i2, i2, 1.0) == 0.5 * i2);

  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix v = oracle::random_orthonormal(12, 4, rng);
    const Matrix y = oracle::random_binary(12, 5, 0.4, rng);
    const double lambda = 0.3;
    Matrix lhs = naive_matmul(naive_transpose(v), v);
    for (std::size_t i = 0; i < 4; ++i) lhs(i, i) += lambda;
    const Matrix ref = oracle::naive_solve(lhs, naive_matmul(naive_transpose(v), y));
    CHECK(oracle::max_abs_diff(decoder_W(v, y, lambda), ref) <= 1e-12);
  }
  CHECK_THROWS_AS(decoder_W(Matrix(3, 2), Matrix(4, 2), 0.0), InvalidInput);
}

TEST_CASE("fit_cmll recovers Y exactly when beta is zero and m = rank Y") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 30, labels = 8, r = 2 + rng.below(4);
    // rows are copies of r prototypes
    const Matrix proto = oracle::random_binary(r, labels, 0.5, rng);
    Matrix y(n, labels);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = i < r ? i : rng.below(r);
      for (std::size_t j = 0; j < labels; ++j) y(i, j) = proto(k, j);
    }
    const std::size_t rank = numeric_rank(y);
    if (rank == 0) continue;
    Dataset d{Matrix::gaussian(n, 6, rng), y, ""};
    CmllParams p;
    p.beta = 0.0;
    p.m = rank;
    p.d = 3;
    const CmllModel model = fit_cmll(d, p);
    CHECK(span_residual(model.V, y) <= 1e-8 * oracle::fro(y));
    CHECK(oracle::fro(naive_matmul(model.V, model.W) - y) <= 1e-8 * oracle::fro(y));
  }
}

TEST_CASE("fit_cmll on a random N=40 problem") {
  Rng rng(4);
  const Dataset d = random_task(40, 10, 6, rng);
  CmllParams p;
  p.m = 3;
  p.d = 4;
  p.beta = 1.0;
  CHECK(p.tol == 1e-5);
  CHECK(p.maxc == 50);
  const CmllModel model = fit_cmll(d, p);
  CHECK(model.converged);
  CHECK(model.trace.size() < 50);
  double prev = model.initial_gamma;
  for (const TraceEntry& t : model.trace) {
    CHECK(t.gamma >= prev - 1e-9 * std::abs(prev));
    prev = t.gamma;
  }
  CHECK(model.trace.back().delta < 1e-5);
  CHECK(oracle::orthonormality_error(model.P) <= 1e-8);
  CHECK(oracle::orthonormality_error(model.V) <= 1e-8);
  CHECK(model.W == decoder_W(model.V, d.Y, 0.0));
  const Matrix xc = oracle::centered(d.X);
  CHECK(rel(model.final_gamma(), objective_gamma(model.V, model.P, xc, d.Y, 1.0)) <= 1e-10);
}

TEST_CASE("fit_cmll monotone trace across random problems") {
  Rng rng(5);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 20 + rng.below(60), dims = 2 + rng.below(15), labels = 2 + rng.below(8);
    const Dataset d = random_task(n, dims, labels, rng);
    CmllParams p;
    p.m = 1 + rng.below(labels);
    p.d = 1 + rng.below(dims);
    p.beta = std::pow(10.0, rng.uniform(-3, 3));
    p.lambda = trial % 2 ? 0.1 : 0.0;
    p.seed = trial;
    const CmllModel model = fit_cmll(d, p);
    double prev = model.initial_gamma;
    for (const TraceEntry& t : model.trace) {
      CHECK(t.gamma >= prev - 1e-9 * std::abs(prev));
      prev = t.gamma;
    }
    CHECK(oracle::orthonormality_error(model.P) <= 1e-8);
    CHECK(oracle::orthonormality_error(model.V) <= 1e-8);
  }
}

TEST_CASE("fit_cmll objective is invariant under feature rotation") {
  Rng rng(6);
  const Dataset d = random_task(50, 8, 5, rng);
  CmllParams p;
  p.m = 2;
  p.d = 3;
  p.tol = 1e-12;
  p.maxc = 500;
  const Matrix p0 = initial_projection(8, 3, 11);
  const Matrix o = oracle::random_orthonormal(8, 8, rng);
  Dataset rotated{naive_matmul(d.X, o), d.Y, ""};
  const CmllModel a = fit_cmll(d, p, p0);
  const CmllModel b = fit_cmll(rotated, p, naive_matmul(naive_transpose(o), p0));
  CHECK(rel(b.final_gamma(), a.final_gamma()) <= 1e-6);
}

TEST_CASE("fit_cmll scaling X by c matches scaling beta by c^2") {
  Rng rng(7);
  const Dataset d = random_task(45, 7, 5, rng);
  const double c = 3.0;
  CmllParams p;
  p.m = 2;
  p.d = 3;
  p.beta = 0.5;
  p.tol = 1e-12;
  p.maxc = 500;
  Dataset scaled{d.X * c, d.Y, ""};
  CmllParams q = p;
  q.beta = p.beta * c * c;
  const CmllModel a = fit_cmll(scaled, p);
  const CmllModel b = fit_cmll(d, q);
  CHECK(rel(a.final_gamma(), b.final_gamma()) <= 1e-8);
}

TEST_CASE("fit_cmll_y") {
  Rng rng(8);
  const Dataset d = random_task(30, 5, 6, rng, 0.4);
  const oracle::Eig ey = oracle::jacobi_eig(naive_matmul(d.Y, naive_transpose(d.Y)));

  SUBCASE("beta near zero approaches the top eigenspace of YY^t") {
    CmllParams p;
    p.beta = 1e-12;
    p.m = 2;
    p.d = 5;
    REQUIRE(ey.values[1] - ey.values[2] > 1e-3);
    const CmllModel model = fit_cmll_y(d, p);
    const Matrix ref = oracle::leading(ey.vectors, 2);
    CHECK(oracle::max_principal_sine(ref, model.V) <= 1e-5);
    const double best = ey.values[0] + ey.values[1];
    CHECK(rel(recovery_term(model.V, d.Y), best) <= 1e-6);
  }
  SUBCASE("matches one sweep of fit_cmll with d = D") {
    CmllParams p;
    p.beta = 0.8;
    p.m = 3;
    p.d = 5;
    p.maxc = 1;
    const CmllModel a = fit_cmll_y(d, p);
    const CmllModel b = fit_cmll(d, p);
    CHECK(oracle::max_principal_sine(a.V, b.V) <= 1e-8);
    CHECK(a.P == Matrix::identity(5));
    CHECK(a.trace.empty());
  }
  SUBCASE("m = M reconstructs Y when it has full column rank") {
    REQUIRE(numeric_rank(d.Y) == 6);
    CmllParams p;
    p.beta = 0.0;
    p.m = 6;
    p.d = 5;
    const CmllModel model = fit_cmll_y(d, p);
    CHECK(oracle::fro(naive_matmul(model.V, model.W) - d.Y) <= 1e-8 * oracle::fro(d.Y));
  }
  CmllParams bad;
  bad.d = 4;
  CHECK_THROWS_AS(fit_cmll_y(d, bad), InvalidInput);
}

TEST_CASE("fit_mddm") {
  SUBCASE("one-hot labels used as features") {
    const std::size_t n = 20, labels = 4;
    Matrix y(n, labels);
    // class sizes 8, 6, 4, 2 give distinct eigenvalues
    const std::size_t sizes[] = {8, 6, 4, 2};
    std::size_t row = 0;
    for (std::size_t c = 0; c < labels; ++c)
      for (std::size_t k = 0; k < sizes[c]; ++k) y(row++, c) = 1.0;
    Dataset d{y, y, ""};
    CmllParams p;
    p.m = labels;
    p.d = 2;
    const CmllModel model = fit_mddm(d, p);
    const Matrix xc = oracle::centered(y);
    const Matrix b = naive_matmul(naive_matmul(naive_transpose(xc), y), naive_matmul(naive_transpose(y), xc));
    const oracle::Eig e = oracle::jacobi_eig(b);
    REQUIRE(e.values[1] - e.values[2] > 1e-6);
    CHECK(oracle::max_principal_sine(oracle::leading(e.vectors, 2), model.P) <= 1e-8);
    CHECK(model.V == y);
    CHECK(model.W == Matrix::identity(labels));
  }
  SUBCASE("d = D leaves ridge predictions unchanged") {
    Rng rng(9);
    const Dataset d = random_task(35, 6, 4, rng);
    CmllParams p;
    p.m = 4;
    p.d = 6;
    const CmllModel model = fit_mddm(d, p);
    CHECK(oracle::orthonormality_error(model.P) <= 1e-10);
    const Matrix xc = oracle::centered(d.X);
    const Matrix u = encode_features(model, d.X);
    const Matrix a = predict(ridge_fit(u, d.Y, 0.1), u);
    const Matrix b = predict(ridge_fit(xc, d.Y, 0.1), xc);
    CHECK(oracle::max_abs_diff(a, b) <= 1e-8);
  }
  SUBCASE("deterministic") {
    Rng rng(10);
    const Dataset d = random_task(25, 5, 3, rng);
    CmllParams p;
    p.m = 3;
    p.d = 2;
    CHECK(fit_mddm(d, p).P == fit_mddm(d, p).P);
    p.m = 2;
    CHECK_THROWS_AS(fit_mddm(d, p), InvalidInput);
  }
}

TEST_CASE("encode_features") {
  Rng rng(11);
  const Dataset d = random_task(20, 5, 3, rng);
  CmllParams p;
  p.m = 2;
  p.d = 2;
  const CmllModel model = fit_cmll(d, p);
  const Matrix xc = center_columns(d.X).centered;
  CHECK(encode_features(model, d.X) == matmul(xc, model.P));

  Matrix mean_row(1, 5);
  for (std::size_t j = 0; j < 5; ++j) mean_row(0, j) = model.feature_means[j];
  const Matrix z = encode_features(model, mean_row);
  CHECK(max_abs(z) == 0.0);

  const Matrix x = Matrix::gaussian(1, 5, rng);
  Matrix shifted = x;
  for (std::size_t j = 0; j < 5; ++j) shifted(0, j) -= model.feature_means[j];
  CHECK(oracle::max_abs_diff(encode_features(model, x), naive_matmul(shifted, model.P)) <= 1e-12);
  CHECK_THROWS_AS(encode_features(model, Matrix(1, 4)), InvalidInput);
}

TEST_CASE("parameter validation") {
  Rng rng(12);
  const Dataset d = random_task(10, 4, 3, rng);
  auto with = [](auto f) {
    CmllParams p;
    f(p);
    return p;
  };
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.m = 0; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.m = 4; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.d = 5; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.tol = 0; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.maxc = 0; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.beta = -1; })), InvalidInput);
  CHECK_THROWS_AS(fit_cmll(d, with([](CmllParams& p) { p.lambda = -0.1; })), InvalidInput);

  CHECK(dimension_from_ratio(0.6, 15) == 9);
  CHECK(dimension_from_ratio(0.01, 15) == 1);
  CHECK(dimension_from_ratio(1.0, 15) == 15);
}
