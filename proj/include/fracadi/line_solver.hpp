#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fracadi {

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(std::span<const double> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) noexcept {
    return data_[r * cols_ + c];
  }
  double operator()(std::size_t r, std::size_t c) const noexcept {
    return data_[r * cols_ + c];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  DenseMatrix transpose() const;
  double max_abs() const noexcept;
  /// Maximum absolute row sum.
  double inf_norm() const noexcept;

  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator-=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(double s) noexcept;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x);
/// Kronecker product; `b` is the fast (inner) factor.
DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b);

/// Partial-pivoting LU, L and U packed into one square array.
struct LuFactors {
  std::size_t size = 0;
  std::vector<double> lu;
  /// pivots[k] is the row swapped into position k at elimination step k.
  std::vector<std::size_t> pivots;
  int permutation_sign = 1;
};

/// Throws SingularMatrixError when a pivot falls below 1e-14 * ||A||_inf.
LuFactors lu_factor(const DenseMatrix& a);
std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b);

/// Solves in place for `width` right-hand sides stored as columns of a
/// row-major block: entry (k, c) of the block lives at base[k * stride + c].
void lu_solve_columns(const LuFactors& f, double* base, std::size_t stride,
                      std::size_t width);
/// Solves in place for `count` right-hand sides stored as contiguous rows.
void lu_solve_rows(const LuFactors& f, double* base, std::size_t count);

/// out = M * in for a column block laid out as in lu_solve_columns.
void multiply_columns(const DenseMatrix& m, const double* in, double* out, std::size_t stride,
                      std::size_t width);
/// out_r = M * in_r for `count` contiguous rows.
void multiply_rows(const DenseMatrix& m, const double* in, double* out, std::size_t count);

DenseMatrix lu_inverse(const LuFactors& f);
double lu_determinant(const LuFactors& f);

struct SymmetricEigen {
  std::vector<double> values;   // ascending
  DenseMatrix vectors;          // column k pairs with values[k]
};

/// Full spectrum of a symmetric matrix, ascending. Householder reduction to
/// tridiagonal form followed by implicit QL.
std::vector<double> sym_eigs(const DenseMatrix& h);
SymmetricEigen sym_eigen(const DenseMatrix& h);

/// Eigenvalues of a general square matrix (LAPACK dgeev).
std::vector<std::complex<double>> eigenvalues_general(const DenseMatrix& a);

/// Largest singular value.
double two_norm(const DenseMatrix& a);

}  // namespace fracadi
