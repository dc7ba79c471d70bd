#include <doctest.h>

#include <cmath>

#include "cmll/eigen.hpp"
#include "cmll/error.hpp"
#include "cmll/matrix.hpp"
#include "cmll/random.hpp"
#include "test_util.hpp"

using namespace cmll;

TEST_CASE("center_columns examples") {
  auto [c, means] = center_columns(Matrix{{1}, {3}});
  CHECK(c == Matrix{{-1}, {1}});
  CHECK(means == std::vector<double>{2});

  auto [z, zm] = center_columns(Matrix(3, 2));
  CHECK(z == Matrix(3, 2));
  CHECK(zm == std::vector<double>{0, 0});

  Rng rng(1);
  const Matrix m = Matrix::gaussian(10, 4, rng);
  Matrix h(10, 10);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 10; ++j) h(i, j) = (i == j ? 1.0 : 0.0) - 0.1;
  CHECK(oracle::max_abs_diff(center_columns(m).centered, oracle::naive_matmul(h, m)) <= 1e-12);

  CHECK_THROWS_AS(center_columns(Matrix()), InvalidInput);
}

TEST_CASE("center_columns is idempotent and zero-sum") {
  Rng rng(2);
  Matrix m = Matrix::gaussian(17, 5, rng);
  m *= 100.0;
  const Matrix once = center_columns(m).centered;
  const Matrix twice = center_columns(once).centered;
  CHECK(oracle::max_abs_diff(once, twice) <= 1e-12);
  for (std::size_t j = 0; j < 5; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < 17; ++i) s += once(i, j);
    CHECK(std::abs(s) <= 1e-12 * 17 * max_abs(m));
  }
}

TEST_CASE("cholesky and triangular solves") {
  Rng rng(3);
  const Matrix g = Matrix::gaussian(8, 6, rng);
  Matrix a = oracle::naive_matmul(oracle::naive_transpose(g), g);
  for (std::size_t i = 0; i < 6; ++i) a(i, i) += 1.0;
  const Matrix l = cholesky(a);
  CHECK(oracle::max_abs_diff(oracle::naive_matmul(l, oracle::naive_transpose(l)), a) <= 1e-12);
  const Matrix b = Matrix::gaussian(6, 3, rng);
  const Matrix x = solve_spd(a, b);
  CHECK(oracle::max_abs_diff(oracle::naive_matmul(a, x), b) <= 1e-10);

  Matrix bad{{1, 2}, {2, 1}};
  try {
    cholesky(bad);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    REQUIRE(e.pivot().has_value());
    CHECK(*e.pivot() == 1);
  }
}

TEST_CASE("orthonormalize_columns") {
  Rng rng(4);
  const Matrix q = orthonormalize_columns(Matrix::gaussian(20, 7, rng));
  CHECK(oracle::orthonormality_error(q) <= 1e-14);
  CHECK_THROWS_AS(orthonormalize_columns(Matrix{{1, 2}, {1, 2}}), NumericError);
}

TEST_CASE("sym_eig_topk examples") {
  SUBCASE("diagonal") {
    Matrix a{{3, 0, 0}, {0, 1, 0}, {0, 0, 2}};
    const EigPairs e = sym_eig_topk(a, 2);
    CHECK(e.values[0] == doctest::Approx(3));
    CHECK(e.values[1] == doctest::Approx(2));
    CHECK(oracle::max_abs_diff(e.vectors, Matrix{{1, 0}, {0, 0}, {0, 1}}) <= 1e-14);
  }
  SUBCASE("identity has a degenerate spectrum") {
    const Matrix a = Matrix::identity(4);
    const EigPairs e = sym_eig_topk(a, 2);
    CHECK(e.values[0] == doctest::Approx(1));
    CHECK(e.values[1] == doctest::Approx(1));
    CHECK(oracle::orthonormality_error(e.vectors) <= 1e-10);
    const Matrix r = oracle::naive_matmul(a, e.vectors);
    CHECK(oracle::max_abs_diff(r, e.vectors) <= 1e-8 * oracle::fro(a));
  }
  SUBCASE("random 8x8 against Jacobi") {
    Rng rng(5);
    const Matrix a = oracle::random_symmetric(8, rng);
    const EigPairs e = sym_eig_topk(a, 3);
    const oracle::Eig ref = oracle::jacobi_eig(a);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(e.values[i] - ref.values[i]) <= 1e-8);
    CHECK(oracle::max_principal_sine(oracle::leading(ref.vectors, 3), e.vectors) <= 1e-6);
  }
}

TEST_CASE("sym_eig_topk errors") {
  CHECK_THROWS_AS(sym_eig_topk(Matrix{{1, 2}, {0, 1}}, 1), InvalidInput);
  CHECK_THROWS_AS(sym_eig_topk(Matrix::identity(3), 0), InvalidInput);
  CHECK_THROWS_AS(sym_eig_topk(Matrix::identity(3), 4), InvalidInput);
  CHECK_THROWS_AS(sym_eig_topk(Matrix(2, 3), 1), InvalidInput);
}

TEST_CASE("sym_eig properties") {
  Rng rng(6);
  for (std::size_t n : {1u, 2u, 3u, 5u, 12u, 25u}) {
    const Matrix a = oracle::random_symmetric(n, rng);
    const EigPairs e = sym_eig(a);
    double sum = 0;
    for (double v : e.values) sum += v;
    CHECK(std::abs(sum - trace(a)) <= 1e-8 * std::max(1.0, oracle::fro(a)));
    for (std::size_t i = 1; i < n; ++i) CHECK(e.values[i - 1] >= e.values[i]);
    CHECK(oracle::orthonormality_error(e.vectors) <= 1e-10);
    // residuals and sign rule
    const Matrix av = oracle::naive_matmul(a, e.vectors);
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0;
      std::size_t best = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = av(i, j) - e.values[j] * e.vectors(i, j);
        r += d * d;
        if (std::abs(e.vectors(i, j)) > std::abs(e.vectors(best, j))) best = i;
      }
      CHECK(std::sqrt(r) <= 1e-8 * oracle::fro(a));
      CHECK(e.vectors(best, j) > 0);
    }
    // bit-identical repeat
    const EigPairs again = sym_eig(a);
    CHECK(again.values == e.values);
    CHECK(again.vectors == e.vectors);
  }
}

TEST_CASE("sym_eig handles graded and clustered spectra") {
  Matrix a(6, 6);
  const double vals[6] = {1e6, 1.0, 1.0 + 1e-9, 1e-6, -3.0, 0.0};
  Rng rng(8);
  const Matrix q = oracle::random_orthonormal(6, 6, rng);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      double s = 0;
      for (std::size_t k = 0; k < 6; ++k) s += q(i, k) * vals[k] * q(j, k);
      a(i, j) = s;
    }
  a = symmetrized(a);
  const EigPairs e = sym_eig(a);
  CHECK(e.values[0] == doctest::Approx(1e6).epsilon(1e-12));
  CHECK(e.values[5] == doctest::Approx(-3.0).epsilon(1e-8));
  CHECK(oracle::orthonormality_error(e.vectors) <= 1e-10);
}

TEST_CASE("gen_sym_eig_topk examples") {
  SUBCASE("identity metric reproduces the standard problem") {
    Rng rng(9);
    const Matrix b = oracle::random_symmetric(7, rng);
    const EigPairs g = gen_sym_eig_topk(b, Matrix::identity(7), 3, 0.0);
    const EigPairs s = sym_eig_topk(b, 3);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.values[i] - s.values[i]) <= 1e-12);
    CHECK(oracle::max_abs_diff(g.vectors, s.vectors) <= 1e-12);
  }
  SUBCASE("2x2 by hand") {
    const EigPairs g = gen_sym_eig_topk(Matrix{{4, 0}, {0, 1}}, Matrix{{2, 0}, {0, 1}}, 1, 0.0);
    CHECK(g.values[0] == doctest::Approx(2.0));
    CHECK(g.vectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(g.vectors(1, 0) == doctest::Approx(0.0));
  }
  SUBCASE("random pencil against an explicit reduction") {
    Rng rng(10);
    const Matrix b = oracle::random_symmetric(8, rng);
    const Matrix gm = Matrix::gaussian(8, 8, rng);
    Matrix q = oracle::naive_matmul(oracle::naive_transpose(gm), gm);
    for (std::size_t i = 0; i < 8; ++i) q(i, i) += 1.0;
    q = symmetrized(q);
    const EigPairs g = gen_sym_eig_topk(b, q, 3, 0.0);

    // Oracle: Q^-1/2 B Q^-1/2 through Jacobi on Q.
    const oracle::Eig qe = oracle::jacobi_eig(q);
    Matrix qih(8, 8);
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        double s = 0;
        for (std::size_t k = 0; k < 8; ++k) s += qe.vectors(i, k) * qe.vectors(j, k) / std::sqrt(qe.values[k]);
        qih(i, j) = s;
      }
    const oracle::Eig ref = oracle::jacobi_eig(oracle::naive_matmul(oracle::naive_matmul(qih, b), qih));
    const Matrix r_ref = oracle::naive_matmul(qih, oracle::leading(ref.vectors, 3));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(g.values[i] - ref.values[i]) <= 1e-7);
    for (std::size_t j = 0; j < 3; ++j) {
      double dot = 0;
      for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t k = 0; k < 8; ++k) dot += g.vectors(i, j) * q(i, k) * r_ref(k, j);
      CHECK(std::abs(std::abs(dot) - 1.0) <= 1e-7);
    }
    // Q-orthonormality and residual
    const Matrix rtqr = oracle::naive_matmul(oracle::naive_transpose(g.vectors), oracle::naive_matmul(q, g.vectors));
    CHECK(oracle::max_abs_diff(rtqr, Matrix::identity(3)) <= 1e-8);
    const Matrix br = oracle::naive_matmul(b, g.vectors);
    const Matrix qr = oracle::naive_matmul(q, g.vectors);
    for (std::size_t j = 0; j < 3; ++j) {
      double r = 0;
      for (std::size_t i = 0; i < 8; ++i) r += std::pow(br(i, j) - g.values[j] * qr(i, j), 2);
      CHECK(std::sqrt(r) <= 1e-7 * oracle::fro(b));
    }
  }
}

TEST_CASE("gen_sym_eig_topk errors") {
  CHECK_THROWS_AS(gen_sym_eig_topk(Matrix::identity(2), Matrix{{1, 0}, {0, -1}}, 1, 0.0), NumericError);
  CHECK_THROWS_AS(gen_sym_eig_topk(Matrix::identity(2), Matrix::identity(3), 1), InvalidInput);
  CHECK_THROWS_AS(gen_sym_eig_topk(Matrix::identity(2), Matrix::identity(2), 1, -1.0), InvalidInput);
  // Rank-deficient metric succeeds with the default ridge.
  const Matrix q{{1, 1}, {1, 1}};
  CHECK_NOTHROW(gen_sym_eig_topk(Matrix::identity(2), q, 1));
  CHECK(default_metric_ridge(q) == doctest::Approx(1e-8));
}
