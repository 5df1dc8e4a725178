#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracadi/bench_harness.hpp"
#include "fracadi/diagnostics.hpp"
#include "fracadi/errors.hpp"

using namespace fracadi;

namespace {

struct Overrides {
  std::string config;
  std::vector<std::pair<std::string, std::string>> settings;
  std::optional<std::string> problem, alpha, beta, gamma, scheme, n, nt_ratio, t_end, output,
      format, bootstrap, levels_list, ratios;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "Run configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--problem", problem, "p1d | p2d | p3d | riesz2d");
    cmd->add_option("--alpha", alpha);
    cmd->add_option("--beta", beta);
    cmd->add_option("--gamma", gamma);
    cmd->add_option("--scheme", scheme, "cn_full | pr_adi | d_adi | d_adi2 | fs | fs2");
    cmd->add_option("--n", n, "Intervals per axis");
    cmd->add_option("--nt-ratio", nt_ratio, "tau / dx");
    cmd->add_option("--t-end", t_end);
    cmd->add_option("--output", output, "Output file (default: stdout)");
    cmd->add_option("--format", format, "csv | markdown");
    cmd->add_option("--bootstrap", bootstrap, "d_adi | exact");
    cmd->add_option("--level-list", levels_list, "Comma-separated 1/dx values");
    cmd->add_option("--ratios", ratios, "Comma-separated tau/dx values");
  }

  std::vector<RunConfig> load() const {
    std::vector<RunConfig> cfgs = config.empty() ? std::vector<RunConfig>{RunConfig{}}
                                                 : load_config(config);
    const std::pair<const char*, const std::optional<std::string>*> keys[] = {
        {"problem", &problem}, {"alpha", &alpha},     {"beta", &beta},
        {"gamma", &gamma},     {"scheme", &scheme},   {"n", &n},
        {"nt_ratio", &nt_ratio}, {"t_end", &t_end},   {"output", &output},
        {"format", &format},   {"bootstrap", &bootstrap}, {"levels", &levels_list},
        {"ratios", &ratios}};
    for (auto& cfg : cfgs) {
      for (const auto& [key, value] : keys)
        if (*value) apply_setting(cfg, key, **value);
      validate_config(cfg);
    }
    return cfgs;
  }
};

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int cmd_solve(const Overrides& o) {
  for (const RunConfig& cfg : o.load()) {
    const CatalogEntry& e = catalog_entry(cfg.problem);
    const double t_end = cfg.t_end.value_or(e.t_end);
    const double dx = (e.hi - e.lo) / cfg.n;
    const Problem p = make_problem(cfg.problem, cfg.params(), cfg.n,
                                   steps_for(t_end, dx, cfg.nt_ratio), t_end);
    RunOptions opts;
    opts.bootstrap = cfg.bootstrap.value_or(Bootstrap::DAdi);
    const RunResult res = run(p, cfg.scheme, opts);
    const double err = max_error(res.solution, sample_field(p, Sample::Exact, t_end));
    std::fprintf(stderr, "%s problem=%s scheme=%s n=%d steps=%d max_error=%.4e\n",
                 cfg.label().c_str(), to_string(cfg.problem).c_str(),
                 to_string(cfg.scheme).c_str(), cfg.n, res.steps, err);
    if (!cfg.output.empty()) write_out(cfg.output, emit_field(p.axes, res.solution));
  }
  return 0;
}

int cmd_convergence(const Overrides& o, int max_levels) {
  const auto cfgs = o.load();
  std::vector<ConvergenceRecord> all;
  bool ok = true;
  for (RunConfig cfg : cfgs) {
    if (max_levels > 0 && static_cast<int>(cfg.levels.size()) > max_levels)
      cfg.levels.resize(max_levels);
    for (auto& rec : run_convergence_study(cfg)) {
      if (!rec.failure.empty()) {
        ok = false;
        std::cerr << rec.series << " level " << rec.level << ": " << rec.failure << '\n';
      }
      all.push_back(std::move(rec));
    }
  }
  write_out(cfgs.front().output, emit_table(all, cfgs.front().format));
  return ok ? 0 : 1;
}

int cmd_compare(const Overrides& o) {
  for (const RunConfig& cfg : o.load()) {
    const SplittingTable t = run_splitting_comparison(cfg);
    write_out(cfg.output, emit_splitting_table(t, cfg.format));
    std::fprintf(stderr, "%s equivalence_gap=%.3e\n", cfg.label().c_str(), t.equivalence_gap);
  }
  return 0;
}

int cmd_stability(const std::vector<double>& mus, const std::vector<int>& sizes, double ratio) {
  bool ok = true;
  auto emit = [&](const SpectralReport& r, const std::string& tag) {
    std::cout << "[" << tag << "]\n" << r.to_key_value() << '\n';
    ok = ok && r.passed();
  };
  for (double mu : mus) {
    for (int q : sizes) {
      std::ostringstream tag;
      tag << "mu=" << mu << " q=" << q;
      emit(verify_definiteness(FracOrder(mu), q), tag.str() + " definiteness");

      const int n = q + 1;
      const double tau = ratio / n;
      for (double kappa : {0.0, 1.0}) {
        const AxisSpec axis(0, 1, n, FracOrder(mu), constant(1), constant(1), constant(kappa));
        emit(verify_norm_bounds(build_direction_operator(axis, 0, tau)),
             tag.str() + (kappa == 0 ? " norms riesz" : " norms advective"));
      }
      emit(verify_iteration_spectrum(make_constant_problem(1, mu, n, 1, tau, 1, 1, 1),
                                     SchemeKind::CnFull),
           tag.str() + " spectrum cn_full");
      if (q * q <= 500) {
        const Problem p2 = make_constant_problem(2, mu, n, 1, tau);
        emit(verify_iteration_spectrum(p2, SchemeKind::DAdi), tag.str() + " spectrum d_adi");
        emit(verify_iteration_spectrum(p2, SchemeKind::DAdi2), tag.str() + " spectrum d_adi2");
      }
    }
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional ADI solvers and benchmark harness"};
  app.require_subcommand(1);

  Overrides solve_o, conv_o, cmp_o;
  auto* solve = app.add_subcommand("solve", "Run one problem and report the max error");
  solve_o.attach(solve);

  auto* conv = app.add_subcommand("convergence", "Error and rate table over refinement levels");
  conv_o.attach(conv);
  int max_levels = 0;
  conv->add_option("--levels", max_levels, "Use only the first k levels")->check(CLI::Range(2, 64));

  auto* cmp = app.add_subcommand("compare-splitting", "D-ADI vs D-ADI-II vs FS-II on riesz2d");
  cmp_o.attach(cmp);

  auto* stab = app.add_subcommand("stability-report", "Numerical stability checks");
  std::vector<double> mus{1.1, 1.5, 1.9};
  std::vector<int> sizes{4, 8, 16, 32};
  double ratio = 1.0;
  stab->add_option("--mu", mus, "Fractional orders")->delimiter(',');
  stab->add_option("--sizes", sizes, "Interior sizes q")->delimiter(',');
  stab->add_option("--ratio", ratio, "tau / dx")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) return cmd_solve(solve_o);
    if (*conv) return cmd_convergence(conv_o, max_levels);
    if (*cmp) return cmd_compare(cmp_o);
    if (*stab) return cmd_stability(mus, sizes, ratio);
  } catch (const std::exception& ex) {
    std::cerr << "fracadi: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
