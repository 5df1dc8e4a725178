#include "fracadi/line_solver.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fracadi/errors.hpp"

extern "C" void dgeev_(const char* jobvl, const char* jobvr, const int* n, double* a,
                       const int* lda, double* wr, double* wi, double* vl, const int* ldvl,
                       double* vr, const int* ldvr, double* work, const int* lwork, int* info);

namespace fracadi {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::diagonal(std::span<const double> d) {
  DenseMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double DenseMatrix::inf_norm() const noexcept {
  double m = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (double v : row(r)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix sum: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw DimensionError("matrix difference: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matrix product: inner sizes differ");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw DimensionError("matrix-vector product: size mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    y[i] = std::inner_product(r.begin(), r.end(), x.begin(), 0.0);
  }
  return y;
}

DenseMatrix kron(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
    }
  return k;
}

LuFactors lu_factor(const DenseMatrix& a) {
  if (!a.square()) throw DimensionError("lu_factor: matrix is not square");
  const std::size_t n = a.rows();
  LuFactors f;
  f.size = n;
  f.lu.assign(a.data().begin(), a.data().end());
  f.pivots.resize(n);
  const double threshold = 1e-14 * a.inf_norm();
  auto at = [&](std::size_t r, std::size_t c) -> double& { return f.lu[r * n + c]; };

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(at(k, k));
    for (std::size_t r = k + 1; r < n; ++r)
      if (std::abs(at(r, k)) > best) {
        best = std::abs(at(r, k));
        p = r;
      }
    if (!(best > threshold) || best == 0.0) {
      std::ostringstream msg;
      msg << "matrix is singular to working precision at pivot " << k
          << " (|pivot| = " << best << ")";
      throw SingularMatrixError(k, msg.str());
    }
    f.pivots[k] = p;
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(at(k, c), at(p, c));
      f.permutation_sign = -f.permutation_sign;
    }
    const double inv = 1.0 / at(k, k);
    for (std::size_t r = k + 1; r < n; ++r) {
      const double l = at(r, k) * inv;
      at(r, k) = l;
      if (l == 0.0) continue;
      double* rr = &at(r, 0);
      const double* rk = &at(k, 0);
      for (std::size_t c = k + 1; c < n; ++c) rr[c] -= l * rk[c];
    }
  }
  return f;
}

void lu_solve_columns(const LuFactors& f, double* base, std::size_t stride,
                      std::size_t width) {
  const std::size_t n = f.size;
  if (n == 0 || width == 0) return;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = f.pivots[k];
    if (p != k) std::swap_ranges(base + k * stride, base + k * stride + width,
                                 base + p * stride);
  }
  const int ni = static_cast<int>(n), wi = static_cast<int>(width), ld = static_cast<int>(stride);
  cblas_dtrsm(CblasRowMajor, CblasLeft, CblasLower, CblasNoTrans, CblasUnit, ni, wi, 1.0,
              f.lu.data(), ni, base, ld);
  cblas_dtrsm(CblasRowMajor, CblasLeft, CblasUpper, CblasNoTrans, CblasNonUnit, ni, wi, 1.0,
              f.lu.data(), ni, base, ld);
}

void lu_solve_rows(const LuFactors& f, double* base, std::size_t count) {
  const std::size_t n = f.size;
  if (n == 0 || count == 0) return;
  for (std::size_t r = 0; r < count; ++r) {
    double* row = base + r * n;
    for (std::size_t k = 0; k < n; ++k)
      if (f.pivots[k] != k) std::swap(row[k], row[f.pivots[k]]);
  }
  // Row form of L U y = P r:  Y U^T L^T = R P^T.
  const int ni = static_cast<int>(n), ci = static_cast<int>(count);
  cblas_dtrsm(CblasRowMajor, CblasRight, CblasLower, CblasTrans, CblasUnit, ci, ni, 1.0,
              f.lu.data(), ni, base, ni);
  cblas_dtrsm(CblasRowMajor, CblasRight, CblasUpper, CblasTrans, CblasNonUnit, ci, ni, 1.0,
              f.lu.data(), ni, base, ni);
}

void multiply_columns(const DenseMatrix& m, const double* in, double* out, std::size_t stride,
                      std::size_t width) {
  if (m.rows() == 0 || width == 0) return;
  const int q = static_cast<int>(m.rows()), wi = static_cast<int>(width), ld = static_cast<int>(stride);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, q, wi, q, 1.0, m.data().data(), q, in,
              ld, 0.0, out, ld);
}

void multiply_rows(const DenseMatrix& m, const double* in, double* out, std::size_t count) {
  if (m.rows() == 0 || count == 0) return;
  const int q = static_cast<int>(m.rows()), ci = static_cast<int>(count);
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, ci, q, q, 1.0, in, q, m.data().data(), q,
              0.0, out, q);
}

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> b) {
  if (b.size() != f.size) throw DimensionError("lu_solve: right-hand side size mismatch");
  std::vector<double> x(b.begin(), b.end());
  if (!x.empty()) lu_solve_columns(f, x.data(), 1, 1);
  return x;
}

DenseMatrix lu_inverse(const LuFactors& f) {
  DenseMatrix inv = DenseMatrix::identity(f.size);
  if (f.size > 0) lu_solve_columns(f, inv.data().data(), f.size, f.size);
  return inv;
}

double lu_determinant(const LuFactors& f) {
  double det = f.permutation_sign;
  for (std::size_t k = 0; k < f.size; ++k) det *= f.lu[k * f.size + k];
  return det;
}

namespace {

void require_symmetric(const DenseMatrix& h) {
  if (!h.square()) throw DimensionError("symmetric eigensolve: matrix is not square");
  const double tol = 1e-12 * std::max(1.0, h.max_abs());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = i + 1; j < h.cols(); ++j)
      if (std::abs(h(i, j) - h(j, i)) > tol)
        throw Error("symmetric eigensolve: matrix is not symmetric");
}

// Householder reduction of a symmetric matrix to tridiagonal form, keeping
// the orthogonal transform in v. On exit d holds the diagonal and e the
// subdiagonal (e[0] unused).
void tridiagonalize(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(v.rows());
  for (int j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (int i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::abs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0.0;

      for (int j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) v(k, j) -= (f * e[k] + g * d[k]);
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  for (int i = 0; i < n - 1; ++i) {
    v(n - 1, i) = v(i, i);
    v(i, i) = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (int k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
      for (int j = 0; j <= i; ++j) {
        double g = 0.0;
        for (int k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
        for (int k = 0; k <= i; ++k) v(k, j) -= g * d[k];
      }
    }
    for (int k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
  }
  for (int j = 0; j < n; ++j) {
    d[j] = v(n - 1, j);
    v(n - 1, j) = 0.0;
  }
  v(n - 1, n - 1) = 1.0;
  e[0] = 0.0;
}

// Implicit QL on the tridiagonal (d, e), rotating v along.
void tridiagonal_ql(DenseMatrix& v, std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(v.rows());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = std::ldexp(1.0, -52);
  for (int l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < n) {
      if (std::abs(e[m]) <= eps * tst1) break;
      ++m;
    }
    if (m > l) {
      int iterations = 0;
      do {
        if (++iterations > 100)
          throw Error("symmetric eigensolve: QL iteration did not converge");
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < n; ++k) {
            h = v(k, i + 1);
            v(k, i + 1) = s * v(k, i) + c * h;
            v(k, i) = c * v(k, i) - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace

SymmetricEigen sym_eigen(const DenseMatrix& h) {
  require_symmetric(h);
  const std::size_t n = h.rows();
  SymmetricEigen out;
  if (n == 0) return out;
  DenseMatrix v(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = 0.5 * (h(i, j) + h(j, i));
  std::vector<double> d(n), e(n);
  tridiagonalize(v, d, e);
  tridiagonal_ql(v, d, e);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = d[order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

std::vector<double> sym_eigs(const DenseMatrix& h) { return sym_eigen(h).values; }

double two_norm(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  const DenseMatrix at = a.transpose();
  // Gram matrix on the smaller side.
  const DenseMatrix gram = a.rows() >= a.cols() ? multiply(at, a) : multiply(a, at);
  const auto eig = sym_eigs(gram);
  return std::sqrt(std::max(0.0, eig.back()));
}

std::vector<std::complex<double>> eigenvalues_general(const DenseMatrix& a) {
  if (!a.square()) throw DimensionError("eigenvalues_general: matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return {};
  // Column-major copy is the transpose, which has the same spectrum.
  std::vector<double> m(a.data().begin(), a.data().end()), wr(n), wi(n);
  const int one = 1;
  int lwork = -1, info = 0;
  double query = 0.0, dummy = 0.0;
  dgeev_("N", "N", &n, m.data(), &n, wr.data(), wi.data(), &dummy, &one, &dummy, &one, &query,
         &lwork, &info);
  lwork = static_cast<int>(query);
  std::vector<double> work(lwork);
  dgeev_("N", "N", &n, m.data(), &n, wr.data(), wi.data(), &dummy, &one, &dummy, &one,
         work.data(), &lwork, &info);
  if (info != 0) throw Error("eigenvalues_general: dgeev failed, info = " + std::to_string(info));
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = {wr[i], wi[i]};
  return out;
}

}  // namespace fracadi
