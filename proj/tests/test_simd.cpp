#include <doctest.h>

#include <cmath>
#include <vector>

#include "cmll/matrix.hpp"
#include "cmll/random.hpp"
#include "cmll/simd.hpp"
#include "test_util.hpp"

using namespace cmll;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("scalar table is always available") {
  const auto isas = simd::available_isas();
  REQUIRE(!isas.empty());
  CHECK(isas.front() == simd::Isa::scalar);
  CHECK(simd::kernels_for(simd::Isa::scalar) == &simd::scalar_kernels());
}

TEST_CASE("every available kernel set matches the scalar reference") {
  const simd::KernelTable& ref = simd::scalar_kernels();
  Rng rng(7);
  for (simd::Isa isa : simd::available_isas()) {
    const simd::KernelTable* k = simd::kernels_for(isa);
    REQUIRE(k != nullptr);
    CAPTURE(simd::isa_name(isa));
    // Lengths cover empty input, partial vectors and the unrolled main loop with tails.
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto x = random_vec(n, rng);
      const auto y = random_vec(n, rng);
      double mag = 0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(x[i] * y[i]);
      CHECK(std::abs(k->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= 1e-13 * (mag + 1));

      double sq = 0;
      for (std::size_t i = 0; i < n; ++i) sq += (x[i] - y[i]) * (x[i] - y[i]);
      CHECK(std::abs(k->squared_distance(x.data(), y.data(), n) - ref.squared_distance(x.data(), y.data(), n)) <=
            1e-13 * (sq + 1));

      auto y1 = y, y2 = y;
      k->axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y2[i]) + 1));

      auto ax = x, ay = y, bx = x, by = y;
      k->rotate(ax.data(), ay.data(), 0.6, 0.8, n);
      ref.rotate(bx.data(), by.data(), 0.6, 0.8, n);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(ax[i] - bx[i]) <= 1e-15 * (std::abs(bx[i]) + 1));
        CHECK(std::abs(ay[i] - by[i]) <= 1e-15 * (std::abs(by[i]) + 1));
      }
    }
  }
}

TEST_CASE("rotate applies x' = c x - s y, y' = s x + c y") {
  double x[1] = {1.0}, y[1] = {2.0};
  simd::scalar_kernels().rotate(x, y, 0.0, 1.0, 1);
  CHECK(x[0] == doctest::Approx(-2.0));
  CHECK(y[0] == doctest::Approx(1.0));
}

TEST_CASE("matrix products agree across kernel sets") {
  Rng rng(11);
  const Matrix a = Matrix::gaussian(13, 9, rng);
  const Matrix b = Matrix::gaussian(9, 7, rng);
  const Matrix expect = oracle::naive_matmul(a, b);
  for (simd::Isa isa : simd::available_isas()) {
    simd::ScopedIsa scope(isa);
    REQUIRE(scope.ok());
    CHECK(oracle::max_abs_diff(matmul(a, b), expect) <= 1e-12);
    CHECK(oracle::max_abs_diff(matmul_tn(a.transpose(), b), expect) <= 1e-12);
    CHECK(oracle::max_abs_diff(matmul_nt(a, b.transpose()), expect) <= 1e-12);
  }
}

TEST_CASE("unavailable isa is refused and leaves the active table alone") {
  const simd::Isa before = simd::active().isa;
  for (simd::Isa isa : {simd::Isa::avx2, simd::Isa::neon}) {
    if (simd::kernels_for(isa) == nullptr) CHECK_FALSE(simd::set_active(isa));
  }
  CHECK(simd::active().isa == before);
}
