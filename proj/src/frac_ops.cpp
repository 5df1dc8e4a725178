#include "fracadi/frac_ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <thread>

#include "fracadi/errors.hpp"

namespace fracadi {

namespace {

// Below this index the five-term formula is used as written. Above it the
// fourth difference of l^p loses roughly l^4 ulps to cancellation, so it is
// summed instead as the binomial series
//   l^p * sum_{m>=4} binom(p, m) S_m l^-m,   S_m = sum_k c_k k^m,
// with stencil offsets k = 1, 0, -1, -2, -3 and weights 1, -4, 6, -4, 1.
constexpr std::size_t kSeriesFrom = 24;

double g_direct(double p, double l) {
  return std::pow(l + 1, p) - 4 * std::pow(l, p) + 6 * std::pow(l - 1, p) -
         4 * std::pow(l - 2, p) + std::pow(l - 3, p);
}

double g_series(double p, double l) {
  double binom = 1.0;  // binom(p, m)
  double sum = 0.0;
  double inv_pow = 1.0;  // l^-m
  for (int m = 1; m <= 80; ++m) {
    binom *= (p - (m - 1)) / m;
    inv_pow /= l;
    if (m < 4) continue;
    const double s_m = 1.0 + 6.0 * std::pow(-1.0, m) - 4.0 * std::pow(-2.0, m) +
                       std::pow(-3.0, m);
    const double term = binom * s_m * inv_pow;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return std::pow(l, p) * sum;
}

}  // namespace

std::vector<double> frac_weights(double mu, std::size_t count) {
  if (count < 4) throw Error("frac_coeffs: need at least 4 coefficients");
  if (!(mu >= 1.0 && mu <= 2.0)) throw Error("frac_weights: order must lie in [1, 2]");
  const double p = 3.0 - mu;
  std::vector<double> g(count);
  g[0] = 1.0;
  g[1] = -4.0 + std::pow(2.0, p);
  g[2] = 6.0 - std::pow(2.0, 5.0 - mu) + std::pow(3.0, p);
  for (std::size_t l = 3; l < count; ++l) {
    const double dl = static_cast<double>(l);
    g[l] = l < kSeriesFrom ? g_direct(p, dl) : g_series(p, dl);
  }
  return g;
}

FracCoeffs frac_coeffs(FracOrder mu, std::size_t count) {
  return FracCoeffs{mu, frac_weights(mu.value(), count)};
}

double gamma_fn(double x) { return std::exp(std::lgamma(x)); }

double frac_scale(FracOrder mu, double h) {
  return 1.0 / (gamma_fn(4.0 - mu.value()) * std::pow(h, mu.value()));
}

DenseMatrix left_matrix(FracOrder mu, std::size_t q) {
  const FracCoeffs c = frac_coeffs(mu, std::max<std::size_t>(q + 2, 4));
  DenseMatrix a(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j <= std::min(i + 1, q - 1); ++j) a(i, j) = c.g[i - j + 1];
  return a;
}

DenseMatrix advection_matrix(std::size_t q) {
  DenseMatrix b(q, q);
  for (std::size_t i = 0; i + 1 < q; ++i) {
    b(i, i + 1) = 1.0;
    b(i + 1, i) = -1.0;
  }
  return b;
}

std::vector<double> apply_left_frac(std::span<const double> line,
                                    const FracCoeffs& coeffs, double h) {
  const std::size_t q = line.size();
  if (coeffs.g.size() < q + 1) throw DimensionError("apply_left_frac: too few coefficients");
  const double scale = frac_scale(coeffs.mu, h);
  std::vector<double> out(q, 0.0);
  // Interior index i (0-based) sits at node i+1; the sum runs over
  // u_{node - l + 1} for l = 0 .. node + 1, i.e. entries j = i + 1 - l.
  for (std::size_t i = 0; i < q; ++i) {
    double s = 0.0;
    const std::size_t jmax = std::min(i + 1, q - 1);
    for (std::size_t j = 0; j <= jmax; ++j) s += coeffs.g[i + 1 - j] * line[j];
    out[i] = scale * s;
  }
  return out;
}

std::vector<double> apply_right_frac(std::span<const double> line,
                                     const FracCoeffs& coeffs, double h) {
  const std::size_t q = line.size();
  if (coeffs.g.size() < q + 1) throw DimensionError("apply_right_frac: too few coefficients");
  const double scale = frac_scale(coeffs.mu, h);
  std::vector<double> out(q, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    double s = 0.0;
    const std::size_t jmin = i == 0 ? 0 : i - 1;
    for (std::size_t j = jmin; j < q; ++j) s += coeffs.g[j + 1 - i] * line[j];
    out[i] = scale * s;
  }
  return out;
}

DirectionOperator::DirectionOperator(const AxisSpec& axis, int axis_index, double tau)
    : axis_(axis_index),
      tau_(tau),
      scale_diff_(0.0),
      scale_adv_(0.0),
      coeffs_(frac_coeffs(axis.order(), std::max(axis.interior() + 2, 4))) {
  if (!(tau > 0.0)) throw Error("direction operator: tau must be positive");
  const std::size_t q = axis.interior();
  const double h = axis.step();
  scale_diff_ = tau / (2.0 * gamma_fn(4.0 - axis.order().value()) *
                       std::pow(h, axis.order().value()));
  scale_adv_ = tau / (4.0 * h);
  d1_.resize(q);
  d2_.resize(q);
  kappa_.resize(q);
  for (std::size_t i = 0; i < q; ++i) {
    const double x = axis.node(static_cast<int>(i) + 1);
    d1_[i] = axis.d1(x);
    d2_[i] = axis.d2(x);
    kappa_[i] = axis.kappa(x);
  }

  matrix_ = DenseMatrix(q, q);
  const auto& g = coeffs_.g;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j) {
      double v = 0.0;
      if (j <= i + 1) v += scale_diff_ * d1_[i] * g[i + 1 - j];  // A
      if (i <= j + 1) v += scale_diff_ * d2_[i] * g[j + 1 - i];  // A^T
      if (j == i + 1) v += scale_adv_ * kappa_[i];
      if (i == j + 1) v -= scale_adv_ * kappa_[i];
      matrix_(i, j) = v;
    }

  DenseMatrix system = DenseMatrix::identity(q) - matrix_;
  try {
    factors_ = lu_factor(system);
  } catch (const SingularMatrixError& e) {
    static const char* names[] = {"x", "y", "z"};
    std::ostringstream msg;
    msg << "(I - M) along axis " << (axis_index >= 0 && axis_index < 3 ? names[axis_index] : "?")
        << " is singular: " << e.what();
    throw SingularMatrixError(e.pivot(), msg.str());
  }
}

DirectionOperator build_direction_operator(const AxisSpec& axis, int axis_index,
                                           double tau) {
  return DirectionOperator(axis, axis_index, tau);
}

unsigned sweep_threads() {
  const char* env = std::getenv("FRACADI_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  try {
    const int n = std::stoi(env);
    return n > 0 ? static_cast<unsigned>(n) : 1u;
  } catch (const std::exception&) {
    return 1;
  }
}

namespace {

// Field viewed as [outer][q][inner]: `inner` is the stride of the operator
// axis, `outer` the number of independent blocks.
struct LineLayout {
  std::size_t q;
  std::size_t inner;
  std::size_t outer;
};

LineLayout layout_for(const DirectionOperator& op, const Field& f) {
  if (op.axis() < 0 || op.axis() >= f.dims())
    throw DimensionError("operator axis exceeds field dimension");
  if (static_cast<std::size_t>(f.extent(op.axis())) != op.size())
    throw DimensionError("operator size does not match field extent");
  LineLayout l{op.size(), 1, 1};
  for (int a = 0; a < op.axis(); ++a) l.inner *= f.extent(a);
  for (int a = op.axis() + 1; a < f.dims(); ++a) l.outer *= f.extent(a);
  return l;
}

// Splits the lines into tiles and runs `work(o, c0, c1)` on each across the
// configured number of threads. With inner == 1 the lines are contiguous
// and a tile is a run of whole lines [c0, c1) (o unused); otherwise a tile
// is columns [c0, c1) of outer block o. Tiles touch disjoint output.
template <typename Work>
void for_each_tile(const LineLayout& l, Work&& work) {
  constexpr std::size_t kChunk = 512;
  const bool rows = l.inner == 1;
  const std::size_t span = rows ? l.outer : l.inner;
  const std::size_t chunks = (span + kChunk - 1) / kChunk;
  const std::size_t tiles = (rows ? 1 : l.outer) * chunks;
  const unsigned threads = std::min<std::size_t>(sweep_threads(), tiles);
  auto run_range = [&](std::size_t t0, std::size_t t1) {
    for (std::size_t t = t0; t < t1; ++t) {
      const std::size_t o = t / chunks;
      const std::size_t c0 = (t % chunks) * kChunk;
      work(o, c0, std::min(span, c0 + kChunk));
    }
  };
  if (threads <= 1) {
    run_range(0, tiles);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back(run_range, tiles * w / threads, tiles * (w + 1) / threads);
}

}  // namespace

Field apply_operator(const DirectionOperator& op, const Field& field) {
  const LineLayout l = layout_for(op, field);
  Field out(field.extents());
  const double* src = field.values().data();
  double* dst = out.values().data();
  const DenseMatrix& m = op.matrix();
  for_each_tile(l, [&](std::size_t o, std::size_t c0, std::size_t c1) {
    if (l.inner == 1) {
      multiply_rows(m, src + c0 * l.q, dst + c0 * l.q, c1 - c0);
    } else {
      const std::size_t at = o * l.q * l.inner + c0;
      multiply_columns(m, src + at, dst + at, l.inner, c1 - c0);
    }
  });
  return out;
}

Field solve_lines(const DirectionOperator& op, const Field& rhs) {
  const LineLayout l = layout_for(op, rhs);
  Field out = rhs;
  double* data = out.values().data();
  for_each_tile(l, [&](std::size_t o, std::size_t c0, std::size_t c1) {
    if (l.inner == 1)
      lu_solve_rows(op.factors(), data + c0 * l.q, c1 - c0);
    else
      lu_solve_columns(op.factors(), data + o * l.q * l.inner + c0, l.inner, c1 - c0);
  });
  return out;
}

}  // namespace fracadi
