#include "cmll/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmll/error.hpp"
#include "cmll/random.hpp"
#include "cmll/simd.hpp"

namespace cmll {

namespace {

std::string dims(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput(what);
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, "matrix data length does not match " + dims(*this));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.data_) v = rng.normal();
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  require(values.size() == rows_, "column length mismatch");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "cannot add " + dims(*this) + " and " + dims(other));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require(rows_ == other.rows_ && cols_ == other.cols_,
          "cannot subtract " + dims(other) + " from " + dims(*this));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul: " + dims(a) + " * " + dims(b));
  Matrix c(a.rows(), b.cols());
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double s = a(i, p);
      if (s != 0.0) simd::axpy(s, b.row(p).data(), out, m);
    }
  }
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "matmul_tn: " + dims(a) + "^t * " + dims(b));
  Matrix c(a.cols(), b.cols());
  const std::size_t m = b.cols();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double* src = b.row(p).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(p, i);
      if (s != 0.0) simd::axpy(s, src, c.row(i).data(), m);
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.cols(), "matmul_nt: " + dims(a) + " * " + dims(b) + "^t");
  Matrix c(a.rows(), b.rows());
  const std::size_t k = a.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      c(i, j) = simd::dot(a.row(i).data(), b.row(j).data(), k);
    }
  }
  return c;
}

Matrix gram(const Matrix& a) {
  Matrix g = matmul_tn(a, a);
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

Matrix outer_gram(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = simd::dot(a.row(i).data(), a.row(j).data(), a.cols());
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

double squared_frobenius_norm(const Matrix& a) {
  return simd::dot(a.data(), a.data(), a.size());
}

double frobenius_norm(const Matrix& a) { return std::sqrt(squared_frobenius_norm(a)); }

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double trace(const Matrix& a) {
  require(a.rows() == a.cols(), "trace of non-square " + dims(a));
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows(), "hcat: " + dims(a) + " | " + dims(b));
  Matrix c(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::copy(a.row(r).begin(), a.row(r).end(), c.row(r).begin());
    std::copy(b.row(r).begin(), b.row(r).end(), c.row(r).begin() + a.cols());
  }
  return c;
}

Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i] < a.rows(), "row index out of range");
    std::copy(a.row(rows[i]).begin(), a.row(rows[i]).end(), out.row(i).begin());
  }
  return out;
}

Matrix leading_columns(const Matrix& a, std::size_t count) {
  require(count <= a.cols(), "leading_columns: too many columns requested");
  Matrix out(a.rows(), count);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    std::copy_n(a.row(r).begin(), count, out.row(r).begin());
  }
  return out;
}

std::vector<double> column_means(const Matrix& a) {
  require(a.rows() >= 1, "column means of an empty matrix");
  std::vector<double> sums(a.cols(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto row = a.row(r);
    for (std::size_t c = 0; c < a.cols(); ++c) sums[c] += row[c];
  }
  const double n = static_cast<double>(a.rows());
  for (double& s : sums) s /= n;
  return sums;
}

CenteredColumns center_columns(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("center_columns: empty matrix");
  std::vector<double> means = column_means(m);
  return {subtract_row_vector(m, means), std::move(means)};
}

Matrix subtract_row_vector(const Matrix& m, std::span<const double> offsets) {
  require(offsets.size() == m.cols(), "offset length does not match column count");
  Matrix out = m;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) row[c] -= offsets[c];
  }
  return out;
}

bool all_finite(const Matrix& m) noexcept {
  return std::all_of(m.values().begin(), m.values().end(),
                     [](double v) { return std::isfinite(v); });
}

void require_finite(const Matrix& m, const char* what) {
  if (!all_finite(m)) throw InvalidInput(std::string(what) + " contains NaN or infinite entries");
}

double asymmetry(const Matrix& a) {
  require(a.rows() == a.cols(), "asymmetry of non-square " + dims(a));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(a(i, j) - a(j, i)));
  }
  return worst;
}

Matrix symmetrized(const Matrix& a) {
  require(a.rows() == a.cols(), "symmetrized: non-square " + dims(a));
  Matrix s = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

Matrix orthonormalize_columns(const Matrix& a) {
  Matrix t = a.transpose();
  const std::size_t n = t.cols();
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double* vi = t.row(i).data();
    const double original = std::sqrt(simd::dot(vi, vi, n));
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < i; ++j) {
        const double* vj = t.row(j).data();
        simd::axpy(-simd::dot(vi, vj, n), vj, vi, n);
      }
    }
    const double norm = std::sqrt(simd::dot(vi, vi, n));
    if (!(norm > 1e-10 * original) || norm == 0.0) {
      throw NumericError("orthonormalize_columns: column " + std::to_string(i) +
                         " is linearly dependent on its predecessors");
    }
    for (std::size_t k = 0; k < n; ++k) vi[k] /= norm;
  }
  return t.transpose();
}

Matrix cholesky(const Matrix& a) {
  require(a.rows() == a.cols(), "cholesky of non-square " + dims(a));
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = a(i, j) - simd::dot(l.row(i).data(), l.row(j).data(), j);
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw NumericError("cholesky: matrix not positive definite at pivot " +
                                 std::to_string(i),
                             i);
        }
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  return l;
}

Matrix solve_lower(const Matrix& lower, const Matrix& b) {
  require(lower.rows() == lower.cols() && lower.rows() == b.rows(),
          "solve_lower: " + dims(lower) + " vs " + dims(b));
  Matrix x = b;
  const std::size_t m = b.cols();
  for (std::size_t i = 0; i < lower.rows(); ++i) {
    double* xi = x.row(i).data();
    for (std::size_t j = 0; j < i; ++j) {
      const double lij = lower(i, j);
      if (lij != 0.0) simd::axpy(-lij, x.row(j).data(), xi, m);
    }
    const double pivot = lower(i, i);
    for (std::size_t k = 0; k < m; ++k) xi[k] /= pivot;
  }
  return x;
}

Matrix solve_lower_transposed(const Matrix& lower, const Matrix& b) {
  require(lower.rows() == lower.cols() && lower.rows() == b.rows(),
          "solve_lower_transposed: " + dims(lower) + " vs " + dims(b));
  Matrix x = b;
  const std::size_t m = b.cols();
  for (std::size_t ii = lower.rows(); ii-- > 0;) {
    double* xi = x.row(ii).data();
    for (std::size_t j = ii + 1; j < lower.rows(); ++j) {
      const double lji = lower(j, ii);
      if (lji != 0.0) simd::axpy(-lji, x.row(j).data(), xi, m);
    }
    const double pivot = lower(ii, ii);
    for (std::size_t k = 0; k < m; ++k) xi[k] /= pivot;
  }
  return x;
}

Matrix solve_spd(const Matrix& a, const Matrix& b) {
  const Matrix l = cholesky(a);
  return solve_lower_transposed(l, solve_lower(l, b));
}

}  // namespace cmll
