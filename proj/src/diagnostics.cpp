#include "fracadi/diagnostics.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <random>
#include <sstream>

#include "fracadi/cn_reference.hpp"
#include "fracadi/errors.hpp"

namespace fracadi {

namespace {

constexpr std::size_t kMaxSpectrumUnknowns = 500;

bool all_equal(const std::vector<double>& v) {
  if (v.empty()) return true;
  const double ref = v.front();
  const double tol = 1e-14 * std::max(1.0, std::abs(ref));
  return std::all_of(v.begin(), v.end(),
                     [&](double x) { return std::abs(x - ref) <= tol; });
}

bool constant_coefficients(const DirectionOperator& op) {
  return all_equal(op.diag_d1()) && all_equal(op.diag_d2()) && all_equal(op.diag_kappa());
}

DenseMatrix inverse(const DenseMatrix& a) { return lu_inverse(lu_factor(a)); }

// Orthonormalizes the two columns of v (n x k, k <= 2, row-major) in place.
// Returns false if the block collapsed.
bool orthonormalize(std::vector<double>& v, std::size_t n, std::size_t k) {
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t p = 0; p < c; ++p) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i * k + c] * v[i * k + p];
      for (std::size_t i = 0; i < n; ++i) v[i * k + c] -= dot * v[i * k + p];
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += v[i * k + c] * v[i * k + c];
    norm = std::sqrt(norm);
    if (!(norm > 1e-300)) return false;
    for (std::size_t i = 0; i < n; ++i) v[i * k + c] /= norm;
  }
  return true;
}

double ritz_radius(const DenseMatrix& h) {
  double r = 0.0;
  for (const auto& z : eigenvalues_general(h)) r = std::max(r, std::abs(z));
  return r;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace

double max_error(const Field& numeric, const Field& exact) {
  if (!numeric.same_shape(exact)) throw DimensionError("max_error: extent mismatch");
  double m = 0.0;
  const auto a = numeric.values();
  const auto b = exact.values();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    if (std::isnan(d)) return d;
    m = std::max(m, d);
  }
  return m;
}

double observed_rate(double e_coarse, double e_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0))
    throw Error("observed_rate: errors must be positive");
  return std::log2(e_coarse / e_fine);
}

DenseMatrix hermitian_part(const DenseMatrix& a) {
  if (!a.square()) throw DimensionError("hermitian_part: matrix must be square");
  DenseMatrix h = a + a.transpose();
  h *= 0.5;
  return h;
}

bool SpectralReport::passed() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second; });
}

std::string SpectralReport::to_key_value() const {
  std::ostringstream os;
  os << "id = " << id << '\n';
  auto opt = [&os](const char* key, const auto& v) {
    if (v) os << key << " = " << fmt(static_cast<double>(*v)) << '\n';
  };
  opt("q", q);
  opt("mu", mu);
  opt("lambda_max_h", lambda_max_h);
  opt("gerschgorin_max_radius", gerschgorin_max_radius);
  opt("gerschgorin_limit", gerschgorin_limit);
  opt("inverse_norm", inverse_norm);
  opt("cn_norm", cn_norm);
  opt("spectral_radius", spectral_radius);
  opt("power_radius", power_radius);
  opt("power_iterations", power_iterations);
  opt("companion_root_radius", companion_root_radius);
  for (const auto& [name, ok] : checks) os << "check." << name << " = " << (ok ? "pass" : "fail") << '\n';
  for (const auto& n : notes) os << "note = " << n << '\n';
  os << "passed = " << (passed() ? "true" : "false") << '\n';
  return os.str();
}

SpectralReport verify_definiteness(FracOrder mu, std::size_t q, double d1, double d2) {
  if (q == 0 || q > 256) throw DimensionError("verify_definiteness: q must lie in [1, 256]");
  if (!(d1 >= 0.0) || !(d2 >= 0.0) || !(d1 + d2 > 0.0))
    throw Error("verify_definiteness: weights must be non-negative and not both zero");
  SpectralReport r;
  r.id = "definiteness";
  r.q = q;
  r.mu = mu.value();

  const DenseMatrix a = left_matrix(mu, q);
  const DenseMatrix h = hermitian_part(a);
  r.lambda_max_h = sym_eigs(h).back();
  r.check("lambda_max_negative", *r.lambda_max_h < 0.0);
  if (d1 != 1.0 || d2 != 1.0) {
    const DenseMatrix weighted = d1 * a + d2 * a.transpose();
    r.check("weighted_lambda_max_negative", sym_eigs(hermitian_part(weighted)).back() < 0.0);
  }

  double radius = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    double ri = 0.0;
    for (std::size_t j = 0; j < q; ++j)
      if (j != i) ri += std::abs(h(i, j));
    radius = std::max(radius, ri);
  }
  r.gerschgorin_max_radius = radius;
  r.gerschgorin_limit = -frac_coeffs(mu, 4).g[1];
  r.check("gerschgorin_radius_below_limit", radius < *r.gerschgorin_limit);
  return r;
}

SpectralReport verify_norm_bounds(const DirectionOperator& op) {
  if (!constant_coefficients(op))
    throw Error("verify_norm_bounds: operator must have constant coefficients");
  if (op.size() > 128) throw DimensionError("verify_norm_bounds: size exceeds 128");
  SpectralReport r;
  r.id = "norm_bounds/axis" + std::to_string(op.axis());
  r.q = op.size();
  r.mu = op.coeffs().mu.value();

  const DenseMatrix inv = lu_inverse(op.factors());
  const DenseMatrix plus = DenseMatrix::identity(op.size()) + op.matrix();
  r.inverse_norm = two_norm(inv);
  r.cn_norm = two_norm(multiply(inv, plus));
  r.check("inverse_norm_le_1", *r.inverse_norm <= 1.0 + 1e-10);
  r.check("cn_norm_le_1", *r.cn_norm <= 1.0 + 1e-10);
  return r;
}

RadiusEstimate spectral_radius(const DenseMatrix& t, double tol, int max_iterations) {
  if (!t.square()) throw DimensionError("spectral_radius: matrix must be square");
  const std::size_t n = t.rows();
  RadiusEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  const std::size_t k = std::min<std::size_t>(4, n);

  std::mt19937_64 rng(20240517);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n * k), w(n * k);
  for (auto& x : v) x = dist(rng);
  orthonormalize(v, n, k);

  constexpr int kStableRequired = 5;
  int stable = 0;
  double prev = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const int ni = static_cast<int>(n), ki = static_cast<int>(k);
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, ni, ki, ni, 1.0, t.data().data(), ni,
                v.data(), ki, 0.0, w.data(), ki);
    DenseMatrix h(k, k);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b)
        for (std::size_t i = 0; i < n; ++i) h(a, b) += v[i * k + a] * w[i * k + b];
    const double rho = ritz_radius(h);
    est.radius = rho;
    est.iterations = it;

    if (prev >= 0.0 && std::abs(rho - prev) <= tol * std::max(rho, 1e-300))
      ++stable;
    else
      stable = 0;
    prev = rho;
    if (stable >= kStableRequired) {
      est.converged = true;
      return est;
    }
    if (!orthonormalize(w, n, k)) {
      // The block was annihilated: T is nilpotent on it.
      est.radius = rho;
      est.converged = true;
      return est;
    }
    v.swap(w);
  }
  return est;
}

DenseMatrix iteration_matrix(const Problem& problem, SchemeKind scheme) {
  check_admissible(problem, scheme);
  const std::vector<int> extents = problem.extents();
  std::size_t n = 1;
  for (int e : extents) n *= static_cast<std::size_t>(e);
  if (n > kMaxSpectrumUnknowns)
    throw DimensionError("iteration_matrix: more than 500 interior unknowns");
  if (problem.time.n_steps <= 0) throw Error("iteration_matrix: need at least one time step");

  const double tau = problem.time.tau();
  std::vector<DenseMatrix> b;
  for (int ax = 0; ax < problem.dims(); ++ax) {
    const DirectionOperator op = build_direction_operator(problem.axes[ax], ax, tau);
    b.push_back(lift_to_grid(op.matrix(), ax, extents));
  }
  const DenseMatrix id = DenseMatrix::identity(n);

  if (scheme == SchemeKind::CnFull) {
    DenseMatrix sum(n, n);
    for (const auto& m : b) sum += m;
    return multiply(inverse(id - sum), id + sum);
  }

  // S = (I - B_last)^-1 ... (I - B_x)^-1
  DenseMatrix s = id;
  for (const auto& m : b) s = multiply(inverse(id - m), s);

  switch (scheme) {
    case SchemeKind::PrAdi:
    case SchemeKind::DAdi: {
      // Douglas form: prod (I - B) (u' - u) = 2 sum(B) u.
      DenseMatrix sum(n, n);
      for (const auto& m : b) sum += m;
      return id + 2.0 * multiply(s, sum);
    }
    case SchemeKind::Fs: {
      const DenseMatrix inner = multiply(inverse(id - b[0]), id + b[0]) + b[1];
      return multiply(inverse(id - b[1]), inner);
    }
    case SchemeKind::DAdi2:
    case SchemeKind::Fs2: {
      const DenseMatrix bxby = multiply(b[0], b[1]);
      const DenseMatrix pq = multiply(s, multiply(id + b[0], id + b[1]) + bxby);
      const DenseMatrix qm = multiply(s, bxby);
      DenseMatrix c(2 * n, 2 * n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          c(i, j) = pq(i, j);
          c(i, n + j) = -qm(i, j);
        }
        c(n + i, i) = 1.0;
      }
      return c;
    }
    case SchemeKind::CnFull:
      break;
  }
  throw Error("iteration_matrix: unsupported scheme");
}

std::vector<std::pair<double, double>> companion_mode_pairs(const DirectionOperator& ox,
                                                            const DirectionOperator& oy) {
  const std::vector<double> ax = sym_eigs(ox.matrix());
  const std::vector<double> ay = sym_eigs(oy.matrix());
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(ax.size() * ay.size());
  for (double b : ay) {
    for (double a : ax) {
      const double den = (1.0 - a) * (1.0 - b);
      const double q = a * b / den;
      const double p = (1.0 + a) * (1.0 + b) / den;
      pairs.emplace_back(p + q, q);
    }
  }
  return pairs;
}

SpectralReport verify_iteration_spectrum(const Problem& problem, SchemeKind scheme) {
  SpectralReport r;
  r.id = std::to_string(problem.dims()) + "d/" + to_string(scheme);
  r.q = problem.axes.front().interior();
  r.mu = problem.axes.front().order().value();

  const DenseMatrix t = iteration_matrix(problem, scheme);
  const RadiusEstimate est = spectral_radius(t, 1e-8, 10000);
  r.power_iterations = est.iterations;

  const double tau = problem.time.tau();
  std::vector<DirectionOperator> ops;
  bool constant = true;
  for (int ax = 0; ax < problem.dims(); ++ax) {
    ops.push_back(build_direction_operator(problem.axes[ax], ax, tau));
    constant = constant && constant_coefficients(ops.back());
  }
  if (!constant)
    r.notes.push_back("variable coefficients: radius is measured, not covered by theory");

  const bool modal = is_two_step(scheme) && constant && is_riesz_form(problem);
  std::vector<std::pair<double, double>> pairs;
  if (modal) {
    pairs = companion_mode_pairs(ops[0], ops[1]);
    bool condition = true;
    double root_radius = 0.0;
    for (const auto& [b, c] : pairs) {
      condition = condition && std::abs(b) < 1.0 + c && 1.0 + c < 2.0;
      const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4.0 * c));
      root_radius =
          std::max({root_radius, std::abs((b + disc) / 2.0), std::abs((b - disc) / 2.0)});
    }
    r.companion_root_radius = root_radius;
    r.check("root_condition", condition);
  } else if (is_two_step(scheme)) {
    r.notes.push_back("root condition skipped: needs constant-coefficient Riesz operators");
  }

  // The power estimate stops on a small step-to-step change, which can sit
  // well away from the limit when the dominant moduli cluster. The
  // matrices here are small, so the full spectrum is authoritative.
  double rho = 0.0;
  for (const auto& z : eigenvalues_general(t)) rho = std::max(rho, std::abs(z));
  r.spectral_radius = rho;
  r.power_radius = est.radius;
  if (!est.converged || std::abs(est.radius - rho) > 1e-6) {
    std::ostringstream note;
    note << "power iteration " << (est.converged ? "stopped" : "did not converge") << " after "
         << est.iterations << " steps at " << fmt(est.radius) << "; dense eigensolve gives "
         << fmt(rho);
    r.notes.push_back(note.str());
  }
  if (modal) r.check("modal_matches_dense", std::abs(rho - *r.companion_root_radius) <= 1e-9);
  r.check("spectral_radius_lt_1", *r.spectral_radius < 1.0 + 1e-8);
  if (std::abs(*r.spectral_radius - 1.0) <= 1e-12)
    r.notes.push_back("radius equals 1: identity-like iteration on the stability boundary");
  if (!modal) return r;

  // Cross-check the mode pairs against the assembled blocks; symmetric
  // blocks also certify that their eigenvalues are real.
  const std::size_t n = pairs.size();
  DenseMatrix pq(n, n), qm(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      pq(i, j) = t(i, j);
      qm(i, j) = -t(i, n + j);
    }
  const double asym = std::max((pq - pq.transpose()).max_abs(), (qm - qm.transpose()).max_abs());
  r.check("blocks_symmetric", asym <= 1e-9);
  if (asym <= 1e-9) {
    std::vector<double> bs, cs;
    for (const auto& [b, c] : pairs) {
      bs.push_back(b);
      cs.push_back(c);
    }
    std::sort(bs.begin(), bs.end());
    std::sort(cs.begin(), cs.end());
    const std::vector<double> eb = sym_eigs(hermitian_part(pq));
    const std::vector<double> ec = sym_eigs(hermitian_part(qm));
    double diff = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      diff = std::max({diff, std::abs(eb[k] - bs[k]), std::abs(ec[k] - cs[k])});
    r.check("mode_pairs_match_assembly", diff <= 1e-9);
  }
  return r;
}

}  // namespace fracadi
