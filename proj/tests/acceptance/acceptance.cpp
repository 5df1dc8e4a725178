// Acceptance runner. Usage: fracadi_acceptance [AC1 ... AC9]
// Prints one "ACn PASS|FAIL" line per criterion, preceded by indented detail
// lines. Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracadi/bench_harness.hpp"
#include "fracadi/cn_reference.hpp"
#include "fracadi/diagnostics.hpp"
#include "fracadi/frac_ops.hpp"
#include "fracadi/splitting_schemes.hpp"

using namespace fracadi;

namespace {

class Criterion {
 public:
  void detail(const std::string& line) { std::printf("    %s\n", line.c_str()); }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      detail("failed: " + what);
    }
  }
  bool passed() const { return pass_; }

 private:
  bool pass_ = true;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_diff(double got, double want) { return std::abs(got - want) / std::abs(want); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// Convergence tables

struct Series {
  std::string label;
  double alpha, beta, gamma;
  std::vector<double> errors;  // reference errors per level
};

void check_table(Criterion& c, CatalogId problem, SchemeKind scheme, const std::vector<int>& levels,
                 const std::vector<Series>& series, double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  for (const Series& s : series) {
    RunConfig cfg;
    cfg.name = s.label;
    cfg.problem = problem;
    cfg.scheme = scheme;
    cfg.alpha = s.alpha;
    cfg.beta = s.beta;
    cfg.gamma = s.gamma;
    cfg.levels = levels;
    cfg.nt_ratio = 1.0;
    const auto recs = run_convergence_study(cfg);
    for (std::size_t k = 0; k < recs.size(); ++k) {
      const auto& r = recs[k];
      if (!r.error) {
        c.require(false, s.label + " level " + std::to_string(r.level) + ": " + r.failure);
        continue;
      }
      const double want = s.errors[k];
      const double d = rel_diff(*r.error, want);
      std::string line = fmt("%-16s 1/%-4d error %.4e (reference %.4e, %+.1f%%)", s.label.c_str(),
                             r.level, *r.error, want, 100.0 * (*r.error - want) / want);
      if (r.rate) line += fmt("  rate %.4f", *r.rate);
      c.detail(line);
      c.require(d <= 0.10, fmt("%s 1/%d error off by %.1f%%", s.label.c_str(), r.level, 100 * d));
      if (k > 0)
        c.require(r.rate && std::abs(*r.rate - 2.0) <= 0.1,
                  fmt("%s 1/%d rate %.4f outside 2 +- 0.1", s.label.c_str(), r.level,
                      r.rate.value_or(NAN)));
    }
  }
  const double t = seconds_since(t0);
  c.detail(fmt("runtime %.1f s (budget %.0f s)", t, budget_s));
  c.require(t < budget_s, "runtime over budget");
}

void ac1(Criterion& c) {
  check_table(c, CatalogId::P1d, SchemeKind::CnFull, {10, 20, 40, 80, 160},
              {{"alpha=1.1", 1.1, 1.5, 1.5, {0.0022, 4.5729e-4, 1.0712e-4, 2.5242e-5, 5.9414e-6}},
               {"alpha=1.5", 1.5, 1.5, 1.5, {0.0011, 2.6284e-4, 6.2954e-5, 1.5067e-5, 3.6083e-6}},
               {"alpha=1.9", 1.9, 1.5, 1.5, {0.0010, 2.5502e-4, 6.4257e-5, 1.6169e-5, 4.0594e-6}}},
              5.0);
}

void ac2(Criterion& c) {
  check_table(c, CatalogId::P2d, SchemeKind::DAdi, {10, 20, 40, 80, 160},
              {{"(1.1, 1.2)", 1.1, 1.2, 1.5, {0.0133, 0.0033, 8.3408e-4, 2.0877e-4, 5.2231e-5}},
               {"(1.5, 1.4)", 1.5, 1.4, 1.5, {0.0116, 0.0029, 7.4001e-4, 1.8612e-4, 4.6726e-5}},
               {"(1.9, 1.9)", 1.9, 1.9, 1.5, {0.0109, 0.0028, 7.0378e-4, 1.7900e-4, 4.5468e-5}}},
              300.0);
}

void ac3(Criterion& c) {
  c.detail(fmt("line sweep threads: %u", sweep_threads()));
  check_table(c, CatalogId::P3d, SchemeKind::DAdi, {10, 20, 40, 80},
              {{"(1.2, 1.2, 1.2)", 1.2, 1.2, 1.2, {1.2063e-2, 3.0047e-3, 7.5079e-4, 1.8773e-4}},
               {"(1.4, 1.5, 1.6)", 1.4, 1.5, 1.6, {1.3349e-2, 3.3242e-3, 8.3225e-4, 2.0875e-4}},
               {"(1.9, 1.9, 1.9)", 1.9, 1.9, 1.9, {1.5558e-2, 3.7859e-3, 9.4168e-4, 2.3625e-4}}},
              1800.0);
}

// ---------------------------------------------------------------------------
// Splitting comparison

void ac4(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg;
  cfg.problem = CatalogId::Riesz2d;
  cfg.alpha = cfg.beta = 1.9;
  cfg.scheme = SchemeKind::DAdi;
  cfg.n = 100;
  cfg.ratios = {10, 5, 2.5, 1};
  cfg.bootstrap = Bootstrap::Exact;

  const std::map<SchemeKind, std::vector<double>> reference = {
      {SchemeKind::DAdi, {3.3496e-2, 7.6895e-3, 2.0624e-3, 6.0826e-4}},
      {SchemeKind::DAdi2, {2.2638e-3, 1.7249e-4, 2.7765e-4, 3.3166e-4}},
      {SchemeKind::Fs2, {2.2638e-3, 1.7249e-4, 2.7765e-4, 3.3166e-4}}};

  SplittingTable t;
  try {
    t = run_splitting_comparison(cfg);
  } catch (const std::exception& e) {
    c.require(false, e.what());
    return;
  }
  for (std::size_t s = 0; s < t.schemes.size(); ++s) {
    const auto& want = reference.at(t.schemes[s]);
    for (std::size_t k = 0; k < t.ratios.size(); ++k) {
      const double got = t.errors[s][k];
      c.detail(fmt("%-9s tau/dx=%-4g error %.4e (reference %.4e, %+.1f%%)",
                   to_string(t.schemes[s]).c_str(), t.ratios[k], got, want[k],
                   100.0 * (got - want[k]) / want[k]));
      c.require(rel_diff(got, want[k]) <= 0.25,
                fmt("%s at tau/dx=%g off by more than 25%%", to_string(t.schemes[s]).c_str(),
                    t.ratios[k]));
    }
  }
  c.detail(fmt("max |D_ADI_II - FS_II| = %.3e", t.equivalence_gap));
  c.require(t.equivalence_gap <= 1e-13, "D_ADI_II and FS_II differ");
  const double ratio = t.errors[0][0] / t.errors[1][0];
  c.detail(fmt("D_ADI / D_ADI_II at tau/dx=10: %.2f", ratio));
  c.require(ratio >= 5.0, "D_ADI error at tau/dx=10 is not 5x the D_ADI_II error");

  // Information only: a D-ADI first step for the two-step schemes.
  RunConfig alt = cfg;
  alt.ratios = {10};
  alt.bootstrap = Bootstrap::DAdi;
  const SplittingTable a = run_splitting_comparison(alt);
  c.detail(fmt("info: D_ADI first step instead of exact, tau/dx=10: D_ADI_II error %.4e",
               a.errors[1][0]));

  // Information only: quadrature forcing against the extrapolated oracle.
  const Problem p = make_problem(CatalogId::Riesz2d, {1.9, 1.9}, 20, 1);
  const OracleResult o =
      forcing_oracle(*p.exact, p.axes, 8, 0.5, std::numeric_limits<double>::infinity());
  const Field f = sample_forcing(p, 0.5);
  c.detail(fmt("info: forcing vs oracle on 19x19 nodes: max diff %.2e (relative %.2e), oracle "
               "discrepancy %.2e",
               max_error(f, o.values), max_error(f, o.values) / f.max_abs(), o.discrepancy));

  const double secs = seconds_since(t0);
  c.detail(fmt("runtime %.1f s (budget 600 s)", secs));
  c.require(secs < 600.0, "runtime over budget");
}

// ---------------------------------------------------------------------------
// Algebraic identities on small grids

Problem random_constant_problem(std::mt19937_64& rng, double max_ratio) {
  std::uniform_real_distribution<double> mu(1.05, 1.95), co(0.1, 3.0), ka(-2.0, 2.0),
      ra(0.2, max_ratio);
  std::uniform_int_distribution<int> nn(4, 12);
  std::vector<AxisSpec> axes;
  for (int a = 0; a < 2; ++a)
    axes.emplace_back(0.0, 1.0, nn(rng), FracOrder(mu(rng)), constant(co(rng)), constant(co(rng)),
                      constant(ka(rng)));
  const double tau = ra(rng) / axes[0].n();
  return Problem{axes,          TimeSpec(tau, 1), [](const Point&, double) { return 0.0; },
                 [](const Point&) { return 0.0; }, std::nullopt, std::nullopt};
}

Field random_field(const std::vector<int>& extents, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Field f(extents);
  for (double& v : f.values()) v = d(rng);
  return f;
}

std::vector<DenseMatrix> lifted(const Problem& p) {
  std::vector<DenseMatrix> out;
  for (int a = 0; a < p.dims(); ++a)
    out.push_back(
        lift_to_grid(build_direction_operator(p.axes[a], a, p.time.tau()).matrix(), a, p.extents()));
  return out;
}

double scale_of(const Field& u, const Field& f, double tau) {
  return std::max({1.0, u.max_abs(), tau * f.max_abs()});
}

// (I - B) v
Field minus(const DenseMatrix& b, const Field& v) { return v - apply_matrix(b, v); }
Field plus(const DenseMatrix& b, const Field& v) { return v + apply_matrix(b, v); }

void ac5(Criterion& c) {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Problem p = random_constant_problem(rng, 20.0);
    const SteppingState s = make_state(p, random_field(p.extents(), rng));
    const Field f = random_field(p.extents(), rng);
    worst = std::max(worst, (step_pr_adi(s, f) - step_d_adi_2d(s, f)).max_abs());
  }
  c.detail(fmt("PR_ADI vs D_ADI, 20 random problems (tau/dx up to 20): max diff %.2e", worst));
  c.require(worst <= 1e-13, "PR_ADI and D_ADI differ");

  // 2D product equation on random problems and on the variable-coefficient
  // catalog problem.
  std::vector<Problem> two_d;
  for (int k = 0; k < 5; ++k) two_d.push_back(random_constant_problem(rng, 2.0));
  two_d.push_back(make_problem(CatalogId::P2d, {1.3, 1.7}, 8, 1, 0.125));
  double r2 = 0.0;
  for (const Problem& p : two_d) {
    const auto b = lifted(p);
    const double tau = p.time.tau();
    const Field u = random_field(p.extents(), rng), f = random_field(p.extents(), rng);
    const Field next = step_d_adi_2d(make_state(p, u), f);
    Field rhs = plus(b[0], plus(b[1], u));
    rhs.axpy(tau, f);
    r2 = std::max(r2, (minus(b[0], minus(b[1], next)) - rhs).max_abs() / scale_of(u, f, tau));
  }
  c.detail(fmt("2D product equation: max scaled residual %.2e", r2));
  c.require(r2 <= 1e-12, "2D product equation residual");

  // 3D: the unsplit equation plus the stated pairwise and triple
  // perturbation terms, on a 3x3x3 interior.
  const Problem p3 = make_problem(CatalogId::P3d, {1.2, 1.5, 1.8}, 4, 1, 0.25);
  {
    const auto b = lifted(p3);
    const double tau = p3.time.tau();
    const Field u = random_field(p3.extents(), rng), f = random_field(p3.extents(), rng);
    const Field next = step_d_adi_3d(make_state(p3, u), f);
    const Field du = next - u;
    const DenseMatrix sum = b[0] + b[1] + b[2];
    Field pert = apply_matrix(b[0], apply_matrix(b[1], du)) +
                 apply_matrix(b[0], apply_matrix(b[2], du)) +
                 apply_matrix(b[1], apply_matrix(b[2], du));
    pert -= apply_matrix(b[0], apply_matrix(b[1], apply_matrix(b[2], du)));
    Field lhs = minus(sum, next) + pert;
    Field rhs = plus(sum, u);
    rhs.axpy(tau, f);
    const double r3 = (lhs - rhs).max_abs() / scale_of(u, f, tau);
    c.detail(fmt("3D unsplit equation plus perturbation terms: scaled residual %.2e", r3));
    c.require(r3 <= 1e-12, "3D perturbed equation residual");

    Field prod_lhs = minus(b[0], minus(b[1], minus(b[2], next)));
    Field prod_rhs = plus(b[0], plus(b[1], plus(b[2], u)));
    prod_rhs.axpy(tau, f);
    const Field triple = apply_matrix(b[0], apply_matrix(b[1], apply_matrix(b[2], u)));
    c.detail(fmt("info: fully factored 3D product form: residual %.2e, equal to 2*BxByBz*u "
                 "to %.2e",
                 (prod_lhs - prod_rhs).max_abs(), (prod_lhs - prod_rhs + 2.0 * triple).max_abs()));
  }

  // Corrected two-step equation.
  {
    const Problem p = make_problem(CatalogId::Riesz2d, {1.7, 1.3}, 9, 1, 0.5);
    const auto b = lifted(p);
    const double tau = p.time.tau();
    const Field u = random_field(p.extents(), rng), prev = random_field(p.extents(), rng);
    const Field f = random_field(p.extents(), rng);
    SteppingState s = make_state(p, u);
    s.previous = prev;
    double rc = 0.0;
    for (const Field& next : {step_d_adi2_2d(s, f), step_fs2_2d(s, f)}) {
      const Field sum = next + u;
      Field rhs = apply_matrix(b[0], sum) + apply_matrix(b[1], sum);
      rhs -= apply_matrix(b[0], apply_matrix(b[1], next - 2.0 * u + prev));
      rhs.axpy(tau, f);
      rc = std::max(rc, ((next - u) - rhs).max_abs() / scale_of(u, f, tau));
    }
    c.detail(fmt("corrected two-step equation (D_ADI_II, FS_II): max scaled residual %.2e", rc));
    c.require(rc <= 1e-12, "corrected equation residual");
  }
}

void ac6(Criterion& c) {
  std::mt19937_64 rng(11);
  std::vector<Problem> problems;
  for (int k = 0; k < 5; ++k) problems.push_back(random_constant_problem(rng, 2.0));
  problems.push_back(make_problem(CatalogId::P2d, {1.3, 1.7}, 8, 1, 0.125));
  problems.push_back(make_problem(CatalogId::Riesz2d, {1.9, 1.9}, 10, 1, 0.1));
  double rd = 0.0, rf = 0.0;
  for (const Problem& p : problems) {
    const auto b = lifted(p);
    const DenseMatrix m = b[0] + b[1];
    const double tau = p.time.tau();
    const Field u = random_field(p.extents(), rng), f = random_field(p.extents(), rng);
    auto residual = [&](const Field& next) {
      Field r = plus(m, u);
      r.axpy(tau, f);
      return r - minus(m, next);
    };
    const Field nd = step_d_adi_2d(make_state(p, u), f);
    rd = std::max(rd, (residual(nd) - apply_matrix(b[0], apply_matrix(b[1], nd - u))).max_abs());
    const Field nf = step_fs_2d(make_state(p, u), f);
    rf = std::max(rf, (residual(nf) - apply_matrix(b[0], apply_matrix(b[1], nf + u))).max_abs());
  }
  c.detail(fmt("D_ADI residual vs BxBy(u' - u): max diff %.2e", rd));
  c.detail(fmt("FS residual vs BxBy(u' + u): max diff %.2e", rf));
  c.require(rd <= 1e-12, "D_ADI splitting identity");
  c.require(rf <= 1e-12, "FS splitting identity");
}

// ---------------------------------------------------------------------------
// Stability

void ac7(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  int reports = 0;
  auto take = [&](const SpectralReport& r, const std::string& tag) {
    ++reports;
    if (!r.passed()) {
      std::string failed;
      for (const auto& [name, ok] : r.checks)
        if (!ok) failed += " " + name;
      c.require(false, tag + ":" + failed);
    }
  };
  for (double mu : {1.1, 1.5, 1.9}) {
    for (int q : {4, 8, 16, 32}) {
      const std::string tag = fmt("mu=%g q=%d", mu, q);
      const SpectralReport d = verify_definiteness(FracOrder(mu), q);
      take(d, tag + " definiteness");
      c.detail(fmt("%-14s lambda_max(H) %.4e  gerschgorin %.4f < %.4f", tag.c_str(),
                   *d.lambda_max_h, *d.gerschgorin_max_radius, *d.gerschgorin_limit));
      const int n = q + 1;
      for (double ratio : {1.0, 100.0}) {
        for (double kappa : {0.0, 1.0}) {
          const AxisSpec axis(0, 1, n, FracOrder(mu), constant(1), constant(1), constant(kappa));
          const SpectralReport nb = verify_norm_bounds(build_direction_operator(axis, 0, ratio / n));
          take(nb, tag + fmt(" norms ratio=%g kappa=%g", ratio, kappa));
        }
        const double tau = ratio / n;
        take(verify_iteration_spectrum(make_constant_problem(1, mu, n, 1, tau, 1, 1, 1),
                                       SchemeKind::CnFull),
             tag + " spectrum CN 1D");
        if (q <= 16) {
          const Problem p2 = make_constant_problem(2, mu, n, 1, tau);
          const SpectralReport sd = verify_iteration_spectrum(p2, SchemeKind::DAdi);
          const SpectralReport s2 = verify_iteration_spectrum(p2, SchemeKind::DAdi2);
          take(sd, tag + " spectrum D_ADI 2D");
          take(s2, tag + " spectrum D_ADI_II");
          take(verify_iteration_spectrum(make_constant_problem(2, mu, n, 1, tau, 1.5, 0.5, 1.0),
                                         SchemeKind::DAdi),
               tag + " spectrum D_ADI 2D advective");
          c.detail(fmt("%-14s ratio %-3g  rho(D_ADI) %.6f  rho(D_ADI_II) %.6f", tag.c_str(), ratio,
                       *sd.spectral_radius, *s2.spectral_radius));
        }
        if (q <= 4)
          take(verify_iteration_spectrum(make_constant_problem(3, mu, n, 1, tau), SchemeKind::DAdi),
               tag + " spectrum D_ADI 3D");
      }
    }
  }
  const double secs = seconds_since(t0);
  c.detail(fmt("%d reports, runtime %.1f s (budget 60 s)", reports, secs));
  c.require(secs < 60.0, "runtime over budget");
}

void ac8(Criterion& c) {
  for (double mu : {1.1, 1.5, 1.9}) {
    for (int dims : {2, 3}) {
      const int n = dims == 2 ? 32 : 16;
      const double tau = 100.0 / n;
      const Problem p = make_constant_problem(dims, mu, n, 200, 200 * tau);
      SteppingState s = make_state(p, sample_field(p, Sample::Initial));
      const Field zero(p.extents());
      const double u0 = s.current.max_abs();
      double prev = u0, worst_growth = 0.0;
      for (int k = 0; k < 200; ++k) {
        s.current = dims == 2 ? step_d_adi_2d(s, zero) : step_d_adi_3d(s, zero);
        const double now = s.current.max_abs();
        worst_growth = std::max(worst_growth, now - prev);
        prev = now;
      }
      c.detail(fmt("mu=%g %dD N=%d: max-norm %.4e -> %.4e, largest step increase %.2e", mu, dims,
                   n, u0, prev, worst_growth));
      c.require(worst_growth <= 1e-8 * u0, fmt("mu=%g %dD max norm increased", mu, dims));
    }
  }
}

// ---------------------------------------------------------------------------
// Coefficients

void ac9(Criterion& c) {
  constexpr std::size_t L = 1000;
  for (double mu : {1.01, 1.1, 1.5, 1.9, 1.99}) {
    const auto g = frac_coeffs(FracOrder(mu), L + 1).g;
    const std::string tag = fmt("mu=%g", mu);
    c.require(g[0] == 1.0, tag + " g_0 == 1");
    c.require(std::abs(g[1] - (-4.0 + std::pow(2.0, 3 - mu))) <= 1e-15 && g[1] < 0,
              tag + " g_1 == -4 + 2^(3-mu) < 0");
    bool nonneg = true, monotone = true, sums = true;
    double s = g[0] + g[1], s100 = 0.0;
    for (std::size_t l = 2; l <= L; ++l) {
      s += g[l];
      if (l >= 3 && g[l] < 0) nonneg = false;
      if (l >= 4 && g[l] > g[l - 1]) monotone = false;
      if (!(s < 0)) sums = false;
      if (l == 100) s100 = s;
    }
    c.require(nonneg, tag + " g_l >= 0 for l >= 3");
    c.require(monotone, tag + " g_3 >= g_4 >= ...");
    c.require(sums, tag + " partial sums < 0 for m >= 2");
    c.require(std::abs(s) < std::abs(s100), tag + " |sum to 1000| < |sum to 100|");
    c.detail(fmt("%-9s g_1 %.7f  g_2 %.7f  g_3 %.3e  sum to 100 %.3e  sum to 1000 %.3e",
                 tag.c_str(), g[1], g[2], g[3], s100, s));
  }
  const auto w = frac_weights(2.0, 8);
  const double want[] = {1, -2, 1, 0, 0, 0, 0, 0};
  double d = 0.0;
  for (int i = 0; i < 8; ++i) d = std::max(d, std::abs(w[i] - want[i]));
  c.detail(fmt("mu=2 weights: %g %g %g %g %g ... (max deviation %.1e)", w[0], w[1], w[2], w[3],
               w[4], d));
  c.require(d <= 1e-14, "mu=2 collapse to [1, -2, 1, 0, ...]");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> all = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool ok = true;
  for (const auto& [id, fn] : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), id) == wanted.end()) continue;
    Criterion c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c.require(false, std::string("exception: ") + e.what());
    }
    std::printf("%s %s\n", id.c_str(), c.passed() ? "PASS" : "FAIL");
    std::fflush(stdout);
    ok = ok && c.passed();
  }
  return ok ? 0 : 1;
}
