#include "fracadi/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "fracadi/errors.hpp"

namespace fracadi {

FracOrder::FracOrder(double value) : value_(value) {
  if (!(value > 1.0 && value < 2.0)) {
    std::ostringstream msg;
    msg << "fractional order must lie in (1, 2), got " << value;
    throw Error(msg.str());
  }
}

CoefficientFn constant(double value) {
  return [value](double) { return value; };
}

AxisSpec::AxisSpec(double lo, double hi, int n, FracOrder order,
                   CoefficientFn d1, CoefficientFn d2, CoefficientFn kappa)
    : lo_(lo),
      hi_(hi),
      n_(n),
      order_(order),
      d1_(std::move(d1)),
      d2_(std::move(d2)),
      kappa_(std::move(kappa)) {
  if (!(hi > lo)) throw Error("axis requires hi > lo");
  if (n < 2) throw Error("axis requires at least 2 intervals");
  if (!d1_ || !d2_ || !kappa_) throw Error("axis coefficient function missing");
  for (int i = 1; i < n_; ++i) {
    const double x = node(i);
    if (d1_(x) < 0.0 || d2_(x) < 0.0) {
      std::ostringstream msg;
      msg << "diffusion coefficients must be non-negative; violated at x = "
          << x;
      throw Error(msg.str());
    }
  }
}

AxisSpec AxisSpec::with_nodes(int n) const {
  return AxisSpec(lo_, hi_, n, order_, d1_, d2_, kappa_);
}

std::vector<double> build_mesh(const AxisSpec& axis) {
  std::vector<double> nodes(axis.n() + 1);
  for (int i = 0; i <= axis.n(); ++i) nodes[i] = axis.node(i);
  nodes.back() = axis.hi();
  return nodes;
}

TimeSpec::TimeSpec(double t_end_, int n_steps_)
    : t_end(t_end_), n_steps(n_steps_) {
  if (!(t_end > 0.0)) throw Error("final time must be positive");
  if (n_steps < 0) throw Error("step count must be non-negative");
}

Field::Field(std::vector<int> extents, double fill)
    : extents_(std::move(extents)) {
  if (extents_.empty() || extents_.size() > 3)
    throw DimensionError("field must have 1 to 3 axes");
  std::size_t total = 1;
  for (int e : extents_) {
    if (e < 1) throw DimensionError("field extents must be positive");
    total *= static_cast<std::size_t>(e);
  }
  values_.assign(total, fill);
}

void Field::require_finite(const char* context) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      std::ostringstream msg;
      msg << context << ": non-finite value at linear index " << k;
      throw NonFiniteError(msg.str());
    }
  }
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void check_shape(const Field& a, const Field& b) {
  if (!a.same_shape(b)) throw DimensionError("field extents differ");
}
}  // namespace

Field& Field::operator+=(const Field& rhs) {
  check_shape(*this, rhs);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += rhs.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& rhs) {
  check_shape(*this, rhs);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= rhs.values_[k];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& x) {
  check_shape(*this, x);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * x.values_[k];
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

std::vector<int> Problem::extents() const {
  std::vector<int> e;
  for (const auto& a : axes) e.push_back(a.interior());
  return e;
}

Point interior_point(const std::vector<AxisSpec>& axes, const Field& f,
                     std::size_t k) {
  Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < f.dims(); ++a) {
    const std::size_t e = f.extent(a);
    p[a] = axes[a].node(static_cast<int>(k % e) + 1);
    k /= e;
  }
  return p;
}

Field sample_function(const std::vector<AxisSpec>& axes, const SpaceFn& fn) {
  std::vector<int> extents;
  for (const auto& a : axes) extents.push_back(a.interior());
  Field out(extents);
  auto v = out.values();
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(interior_point(axes, out, k));
  return out;
}

Field sample_field(const Problem& problem, Sample which, double t) {
  if (which == Sample::Initial) return sample_function(problem.axes, problem.initial);
  if (!problem.exact) throw Error("problem has no exact solution");
  const auto& exact = *problem.exact;
  return sample_function(problem.axes,
                         [&](const Point& p) { return exact(p, t); });
}

Field sample_forcing(const Problem& problem, double t) {
  if (problem.separable_forcing) {
    Field f = sample_function(problem.axes, problem.separable_forcing->spatial);
    f *= problem.separable_forcing->temporal(t);
    return f;
  }
  return sample_function(problem.axes,
                         [&](const Point& p) { return problem.forcing(p, t); });
}

void validate_problem(const Problem& problem) {
  if (problem.axes.empty() || problem.axes.size() > 3)
    throw Error("problem must have 1 to 3 axes");
  if (!problem.initial || !problem.forcing)
    throw Error("problem needs initial and forcing functions");

  // Boundary nodes of every axis, all combinations of the other axes' nodes.
  const int dims = problem.dims();
  std::vector<std::vector<double>> meshes;
  for (const auto& a : problem.axes) meshes.push_back(build_mesh(a));
  const double scale = std::max(1.0, sample_field(problem, Sample::Initial).max_abs());
  for (int a = 0; a < dims; ++a) {
    std::array<std::size_t, 3> count{1, 1, 1};
    for (int b = 0; b < dims; ++b) count[b] = meshes[b].size();
    count[a] = 2;
    for (std::size_t m = 0; m < count[2]; ++m)
      for (std::size_t j = 0; j < count[1]; ++j)
        for (std::size_t i = 0; i < count[0]; ++i) {
          std::array<std::size_t, 3> idx{i, j, m};
          if (idx[a] == 1) idx[a] = meshes[a].size() - 1;
          Point p{0.0, 0.0, 0.0};
          for (int b = 0; b < dims; ++b) p[b] = meshes[b][idx[b]];
          if (std::abs(problem.initial(p)) > 1e-12 * scale)
            throw Error("initial condition must vanish on the boundary");
        }
  }

  if (problem.exact) {
    const Field u0 = sample_field(problem, Sample::Initial);
    const Field e0 = sample_field(problem, Sample::Exact, 0.0);
    for (std::size_t k = 0; k < u0.size(); ++k)
      if (std::abs(u0.values()[k] - e0.values()[k]) > 1e-12)
        throw Error("exact solution at t = 0 disagrees with initial condition");
  }
}

}  // namespace fracadi
