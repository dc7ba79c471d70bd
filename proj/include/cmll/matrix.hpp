#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace cmll {

class Rng;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix gaussian(std::size_t rows, std::size_t cols, Rng& rng);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  const std::vector<double>& values() const noexcept { return data_; }

  std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  Matrix transpose() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// A^t * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * B^t
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// A^t * A, exactly symmetric.
Matrix gram(const Matrix& a);
/// A * A^t, exactly symmetric.
Matrix outer_gram(const Matrix& a);

double frobenius_norm(const Matrix& a);
double squared_frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);
double trace(const Matrix& a);

/// [A | B]; row counts must agree.
Matrix hcat(const Matrix& a, const Matrix& b);
Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows);
Matrix leading_columns(const Matrix& a, std::size_t count);

std::vector<double> column_means(const Matrix& a);

struct CenteredColumns {
  Matrix centered;
  std::vector<double> means;
};

/// Subtracts each column's mean, i.e. left-multiplies by H = I - ee^t/N without forming H.
CenteredColumns center_columns(const Matrix& m);

/// M - e * offsets^t
Matrix subtract_row_vector(const Matrix& m, std::span<const double> offsets);

/// True when every entry is finite.
bool all_finite(const Matrix& m) noexcept;
/// Throws InvalidInput naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);

/// max |A_ij - A_ji|
double asymmetry(const Matrix& a);
/// (A + A^t) / 2
Matrix symmetrized(const Matrix& a);

/// Modified Gram-Schmidt (two passes) on the columns. Throws NumericError if a
/// column becomes numerically dependent on its predecessors.
Matrix orthonormalize_columns(const Matrix& a);

/// Lower Cholesky factor of a symmetric positive definite matrix. Throws NumericError
/// carrying the failing pivot index.
Matrix cholesky(const Matrix& a);
/// Solves L X = B for lower-triangular L.
Matrix solve_lower(const Matrix& lower, const Matrix& b);
/// Solves L^t X = B for lower-triangular L.
Matrix solve_lower_transposed(const Matrix& lower, const Matrix& b);
/// Solves A X = B for symmetric positive definite A via Cholesky.
Matrix solve_spd(const Matrix& a, const Matrix& b);

}  // namespace cmll
