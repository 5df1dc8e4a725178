#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracadi {

/// Fractional exponent, strictly inside (1, 2).
class FracOrder {
 public:
  explicit FracOrder(double value);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Spatial point; unused trailing coordinates are zero.
using Point = std::array<double, 3>;

using CoefficientFn = std::function<double(double)>;
using SpaceFn = std::function<double(const Point&)>;
using SpaceTimeFn = std::function<double(const Point&, double)>;

CoefficientFn constant(double value);

/// One spatial axis of the tensor-product mesh.
///
/// The mesh has `n + 1` nodes lo = x_0 < ... < x_n = hi. Only the `n - 1`
/// interior nodes carry unknowns; the boundary is homogeneous Dirichlet.
/// Coefficients are functions of the axis coordinate evaluated at nodes, so
/// constant-coefficient problems pass constant functions.
class AxisSpec {
 public:
  AxisSpec(double lo, double hi, int n, FracOrder order, CoefficientFn d1,
           CoefficientFn d2, CoefficientFn kappa);

  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  int n() const noexcept { return n_; }
  int interior() const noexcept { return n_ - 1; }
  double step() const noexcept { return (hi_ - lo_) / n_; }
  double node(int i) const noexcept { return lo_ + i * step(); }
  const FracOrder& order() const noexcept { return order_; }

  double d1(double x) const { return d1_(x); }
  double d2(double x) const { return d2_(x); }
  double kappa(double x) const { return kappa_(x); }

  /// Same axis with a different node count.
  AxisSpec with_nodes(int n) const;

 private:
  double lo_;
  double hi_;
  int n_;
  FracOrder order_;
  CoefficientFn d1_;
  CoefficientFn d2_;
  CoefficientFn kappa_;
};

std::vector<double> build_mesh(const AxisSpec& axis);

struct TimeSpec {
  TimeSpec(double t_end, int n_steps);

  double t_end;
  int n_steps;
  // Meaningless when n_steps == 0; run() returns the initial field then.
  double tau() const noexcept { return t_end / n_steps; }
  double at(int n) const noexcept { return n * tau(); }
};

/// Grid function over interior nodes, x fastest.
///
/// For three axes the linear index of interior node (i, j, m), counted from
/// zero, is i + ex * (j + ey * m).
class Field {
 public:
  Field() = default;
  explicit Field(std::vector<int> extents, double fill = 0.0);

  int dims() const noexcept { return static_cast<int>(extents_.size()); }
  const std::vector<int>& extents() const noexcept { return extents_; }
  int extent(int axis) const { return extents_.at(axis); }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(int i, int j = 0, int m = 0) const noexcept {
    const std::size_t ex = extents_[0];
    const std::size_t ey = dims() > 1 ? extents_[1] : 1;
    return i + ex * (j + ey * static_cast<std::size_t>(m));
  }

  double& operator()(int i, int j = 0, int m = 0) noexcept {
    return values_[index(i, j, m)];
  }
  double operator()(int i, int j = 0, int m = 0) const noexcept {
    return values_[index(i, j, m)];
  }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  bool same_shape(const Field& other) const noexcept {
    return extents_ == other.extents_;
  }

  /// Throws NonFiniteError if any value is NaN or infinite.
  void require_finite(const char* context) const;

  double max_abs() const noexcept;

  Field& operator+=(const Field& rhs);
  Field& operator-=(const Field& rhs);
  Field& operator*=(double s) noexcept;
  /// this += s * x
  Field& axpy(double s, const Field& x);

 private:
  std::vector<int> extents_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Forcing written as temporal(t) * spatial(x); lets drivers sample the
/// spatial part once per grid.
struct SeparableForcing {
  SpaceFn spatial;
  std::function<double(double)> temporal;
};

struct Problem {
  std::vector<AxisSpec> axes;
  TimeSpec time;
  SpaceTimeFn forcing;
  SpaceFn initial;
  std::optional<SpaceTimeFn> exact;
  std::optional<SeparableForcing> separable_forcing;

  int dims() const noexcept { return static_cast<int>(axes.size()); }
  std::vector<int> extents() const;
};

/// Checks the boundary and initial/exact agreement invariants; throws Error.
void validate_problem(const Problem& problem);

enum class Sample { Initial, Exact };

Field sample_field(const Problem& problem, Sample which, double t = 0.0);
/// Evaluates f(., t) at interior nodes.
Field sample_forcing(const Problem& problem, double t);
/// Evaluates an arbitrary space function at interior nodes.
Field sample_function(const std::vector<AxisSpec>& axes, const SpaceFn& fn);

/// Interior node coordinates of linear index `k`.
Point interior_point(const std::vector<AxisSpec>& axes, const Field& f,
                     std::size_t k);

}  // namespace fracadi
