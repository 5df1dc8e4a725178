#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracadi/core_model.hpp"
#include "fracadi/line_solver.hpp"

namespace fracadi {

/// Weights g_0, g_1, ... of the second-order shifted fractional difference.
struct FracCoeffs {
  FracOrder mu;
  std::vector<double> g;
};

/// g_0 .. g_{count-1}. `count` must be at least 4.
FracCoeffs frac_coeffs(FracOrder mu, std::size_t count);
/// Same weights for a raw order in the closed range [1, 2], so the limits
/// (mu = 2 gives the classical [1, -2, 1, 0, ...]) can be inspected.
std::vector<double> frac_weights(double mu, std::size_t count);

/// Gamma(x) as exp(lgamma(x)), for positive x.
double gamma_fn(double x);

/// 1 / (Gamma(4 - mu) h^mu), the scale shared by both one-sided operators.
double frac_scale(FracOrder mu, double h);

/// Lower-Hessenberg Toeplitz matrix: entry (i, j) is g_{i-j+1}, zero above
/// the superdiagonal.
DenseMatrix left_matrix(FracOrder mu, std::size_t q);

/// Central-difference skeleton: +1 above the diagonal, -1 below.
DenseMatrix advection_matrix(std::size_t q);

/// Left Riemann-Liouville approximation on one line of interior values,
/// boundary values taken as zero.
std::vector<double> apply_left_frac(std::span<const double> line,
                                    const FracCoeffs& coeffs, double h);
/// Right-sided mirror of apply_left_frac.
std::vector<double> apply_right_frac(std::span<const double> line,
                                     const FracCoeffs& coeffs, double h);

/// The per-axis operator
///   M = tau/2 * [ (D1 A + D2 A^T) / (Gamma(4-mu) h^mu) + K B / (2h) ]
/// with D1, D2, K the diagonal coefficient matrices, plus the LU factors
/// of (I - M). Immutable once built.
class DirectionOperator {
 public:
  int axis() const noexcept { return axis_; }
  std::size_t size() const noexcept { return matrix_.rows(); }
  double tau() const noexcept { return tau_; }
  double scale_diff() const noexcept { return scale_diff_; }
  double scale_adv() const noexcept { return scale_adv_; }
  const std::vector<double>& diag_d1() const noexcept { return d1_; }
  const std::vector<double>& diag_d2() const noexcept { return d2_; }
  const std::vector<double>& diag_kappa() const noexcept { return kappa_; }
  const FracCoeffs& coeffs() const noexcept { return coeffs_; }
  const DenseMatrix& matrix() const noexcept { return matrix_; }
  const LuFactors& factors() const noexcept { return factors_; }

  friend DirectionOperator build_direction_operator(const AxisSpec& axis,
                                                    int axis_index, double tau);

 private:
  DirectionOperator(const AxisSpec& axis, int axis_index, double tau);

  int axis_;
  double tau_;
  double scale_diff_;
  double scale_adv_;
  std::vector<double> d1_;
  std::vector<double> d2_;
  std::vector<double> kappa_;
  FracCoeffs coeffs_;
  DenseMatrix matrix_;
  LuFactors factors_;
};

/// Throws SingularMatrixError naming the axis if (I - M) is singular.
DirectionOperator build_direction_operator(const AxisSpec& axis, int axis_index,
                                           double tau);

/// M applied along the operator's axis on every grid line.
Field apply_operator(const DirectionOperator& op, const Field& field);
/// w with (I - M) w = rhs on every line along the operator's axis.
Field solve_lines(const DirectionOperator& op, const Field& rhs);

/// Worker count for line sweeps: FRACADI_THREADS if set, else 1.
unsigned sweep_threads();

}  // namespace fracadi
