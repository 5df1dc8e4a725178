#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracadi/core_model.hpp"
#include "fracadi/frac_ops.hpp"

namespace fracadi {

enum class SchemeKind { CnFull, PrAdi, DAdi, DAdi2, Fs, Fs2 };

std::string to_string(SchemeKind s);
/// Accepts cn, cn_full, pr_adi, d_adi, d_adi2 / d_adi_ii, fs, fs2 / fs_ii
/// (case-insensitive, '-' or '_').
SchemeKind parse_scheme(std::string_view name);

/// True for the two-step corrected schemes.
bool is_two_step(SchemeKind s);

/// Per axis d1 == d2 at every interior node and kappa == 0.
bool is_riesz_form(const Problem& problem);

/// Throws InadmissibleSchemeError if `scheme` cannot run on `problem`.
void check_admissible(const Problem& problem, SchemeKind scheme);

struct SteppingState {
  Field current;
  /// u^{n-1}; required by the two-step schemes once n >= 1.
  std::optional<Field> previous;
  int step = 0;
  std::vector<DirectionOperator> ops;

  double tau() const { return ops.at(0).tau(); }
};

SteppingState make_state(const Problem& problem, Field u0);

// Each stepper returns u^{n+1} and leaves the state untouched.
Field step_pr_adi(const SteppingState& state, const Field& f_half);
Field step_d_adi_2d(const SteppingState& state, const Field& f_half);
Field step_d_adi_3d(const SteppingState& state, const Field& f_half);
Field step_d_adi2_2d(const SteppingState& state, const Field& f_half);
Field step_fs_2d(const SteppingState& state, const Field& f_half);
Field step_fs2_2d(const SteppingState& state, const Field& f_half);

/// How the two-step schemes obtain u^1.
enum class Bootstrap {
  DAdi,   ///< one plain D-ADI step
  Exact,  ///< sample the exact solution at t_1
};

std::string to_string(Bootstrap b);
Bootstrap parse_bootstrap(std::string_view name);

struct RunOptions {
  Bootstrap bootstrap = Bootstrap::DAdi;
};

struct RunResult {
  Field solution;
  int steps = 0;
};

/// Advances u_0 through all time steps; f is sampled at t_{n+1/2}.
RunResult run(const Problem& problem, SchemeKind scheme, const RunOptions& options = {});

}  // namespace fracadi
