#include "fracadi/splitting_schemes.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "fracadi/cn_reference.hpp"
#include "fracadi/errors.hpp"

namespace fracadi {

std::string to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::CnFull: return "CN_FULL";
    case SchemeKind::PrAdi: return "PR_ADI";
    case SchemeKind::DAdi: return "D_ADI";
    case SchemeKind::DAdi2: return "D_ADI_II";
    case SchemeKind::Fs: return "FS";
    case SchemeKind::Fs2: return "FS_II";
  }
  return "?";
}

namespace {
std::string normalize(std::string_view name) {
  std::string out;
  for (char c : name) out.push_back(c == '-' ? '_' : static_cast<char>(std::tolower(c)));
  return out;
}
}  // namespace

SchemeKind parse_scheme(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "cn" || n == "cn_full") return SchemeKind::CnFull;
  if (n == "pr_adi") return SchemeKind::PrAdi;
  if (n == "d_adi") return SchemeKind::DAdi;
  if (n == "d_adi2" || n == "d_adi_ii") return SchemeKind::DAdi2;
  if (n == "fs") return SchemeKind::Fs;
  if (n == "fs2" || n == "fs_ii") return SchemeKind::Fs2;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

bool is_two_step(SchemeKind s) { return s == SchemeKind::DAdi2 || s == SchemeKind::Fs2; }

std::string to_string(Bootstrap b) { return b == Bootstrap::DAdi ? "d_adi" : "exact"; }

Bootstrap parse_bootstrap(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "d_adi") return Bootstrap::DAdi;
  if (n == "exact") return Bootstrap::Exact;
  throw ConfigError("unknown bootstrap '" + std::string(name) + "'");
}

bool is_riesz_form(const Problem& problem) {
  for (const auto& axis : problem.axes)
    for (int i = 1; i < axis.n(); ++i) {
      const double x = axis.node(i);
      if (axis.d1(x) != axis.d2(x) || axis.kappa(x) != 0.0) return false;
    }
  return true;
}

void check_admissible(const Problem& problem, SchemeKind scheme) {
  const int dims = problem.dims();
  auto fail = [&](const std::string& why) {
    throw InadmissibleSchemeError(to_string(scheme) + ": " + why);
  };
  switch (scheme) {
    case SchemeKind::CnFull:
      break;
    case SchemeKind::DAdi:
      if (dims != 2 && dims != 3) fail("needs a 2D or 3D problem");
      break;
    case SchemeKind::PrAdi:
    case SchemeKind::Fs:
      if (dims != 2) fail("needs a 2D problem");
      break;
    case SchemeKind::DAdi2:
    case SchemeKind::Fs2:
      if (dims != 2) fail("needs a 2D problem");
      if (!is_riesz_form(problem))
        fail("needs the Riesz form (d1 == d2 and kappa == 0 on every axis)");
      break;
  }
}

SteppingState make_state(const Problem& problem, Field u0) {
  SteppingState s;
  s.current = std::move(u0);
  const double tau = problem.time.tau();
  for (int a = 0; a < problem.dims(); ++a)
    s.ops.push_back(build_direction_operator(problem.axes[a], a, tau));
  return s;
}

namespace {

void require_dims(const SteppingState& s, const Field& f_half, int dims, const char* who) {
  if (s.current.dims() != dims || static_cast<int>(s.ops.size()) != dims) {
    std::ostringstream msg;
    msg << who << ": expects a " << dims << "D state";
    throw DimensionError(msg.str());
  }
  if (!s.current.same_shape(f_half)) throw DimensionError(std::string(who) + ": forcing shape mismatch");
}

const Field& require_previous(const SteppingState& s, const char* who) {
  if (!s.previous) throw Error(std::string(who) + ": u^{n-1} is not available");
  if (!s.previous->same_shape(s.current))
    throw DimensionError(std::string(who) + ": u^{n-1} shape mismatch");
  return *s.previous;
}

Field finish(Field u, const char* who) {
  u.require_finite(who);
  return u;
}

// Shared D-ADI sweeps with an optional extra term on the first right-hand
// side.
Field d_adi_2d_with(const SteppingState& s, const Field& f_half, const Field* extra) {
  const auto& ox = s.ops[0];
  const auto& oy = s.ops[1];
  const Field& u = s.current;
  const Field by_u = apply_operator(oy, u);
  Field rhs = u + apply_operator(ox, u);
  rhs.axpy(2.0, by_u);
  rhs.axpy(s.tau(), f_half);
  if (extra != nullptr) rhs += *extra;
  Field star = solve_lines(ox, rhs);
  star -= by_u;
  return solve_lines(oy, star);
}

Field fs_2d_with(const SteppingState& s, const Field& f_half, const Field* extra) {
  const auto& ox = s.ops[0];
  const auto& oy = s.ops[1];
  const Field& u = s.current;
  Field rhs = u + apply_operator(ox, u);
  rhs.axpy(s.tau(), f_half);
  if (extra != nullptr) rhs += *extra;
  Field half = solve_lines(ox, rhs);
  half += apply_operator(oy, u);
  return solve_lines(oy, half);
}

// B_x B_y v
Field cross_term(const SteppingState& s, const Field& v) {
  return apply_operator(s.ops[0], apply_operator(s.ops[1], v));
}

}  // namespace

Field step_pr_adi(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 2, "step_pr_adi");
  const auto& ox = s.ops[0];
  const auto& oy = s.ops[1];
  Field rhs = s.current + apply_operator(oy, s.current);
  rhs.axpy(0.5 * s.tau(), f_half);
  const Field star = solve_lines(ox, rhs);
  Field rhs2 = star + apply_operator(ox, star);
  rhs2.axpy(0.5 * s.tau(), f_half);
  return finish(solve_lines(oy, rhs2), "step_pr_adi");
}

Field step_d_adi_2d(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 2, "step_d_adi_2d");
  return finish(d_adi_2d_with(s, f_half, nullptr), "step_d_adi_2d");
}

Field step_d_adi_3d(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 3, "step_d_adi_3d");
  const auto& ox = s.ops[0];
  const auto& oy = s.ops[1];
  const auto& oz = s.ops[2];
  const Field& u = s.current;
  const Field ay_u = apply_operator(oy, u);
  const Field az_u = apply_operator(oz, u);
  Field rhs = u + apply_operator(ox, u);
  rhs.axpy(2.0, ay_u);
  rhs.axpy(2.0, az_u);
  rhs.axpy(s.tau(), f_half);
  Field stage = solve_lines(ox, rhs);
  stage -= ay_u;
  stage = solve_lines(oy, stage);
  stage -= az_u;
  return finish(solve_lines(oz, stage), "step_d_adi_3d");
}

Field step_d_adi2_2d(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 2, "step_d_adi2_2d");
  const Field& prev = require_previous(s, "step_d_adi2_2d");
  const Field correction = cross_term(s, s.current - prev);
  return finish(d_adi_2d_with(s, f_half, &correction), "step_d_adi2_2d");
}

Field step_fs_2d(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 2, "step_fs_2d");
  return finish(fs_2d_with(s, f_half, nullptr), "step_fs_2d");
}

Field step_fs2_2d(const SteppingState& s, const Field& f_half) {
  require_dims(s, f_half, 2, "step_fs2_2d");
  const Field& prev = require_previous(s, "step_fs2_2d");
  Field lagged = 3.0 * s.current;
  lagged -= prev;
  const Field correction = cross_term(s, lagged);
  return finish(fs_2d_with(s, f_half, &correction), "step_fs2_2d");
}

RunResult run(const Problem& problem, SchemeKind scheme, const RunOptions& options) {
  check_admissible(problem, scheme);
  const int steps = problem.time.n_steps;
  const double tau = problem.time.tau();
  Field u0 = sample_field(problem, Sample::Initial);
  if (steps == 0) return {std::move(u0), 0};

  // Spatial part of a separable forcing is sampled once.
  std::optional<Field> forcing_profile;
  if (problem.separable_forcing)
    forcing_profile = sample_function(problem.axes, problem.separable_forcing->spatial);
  auto forcing_at = [&](double t) {
    if (forcing_profile) return problem.separable_forcing->temporal(t) * *forcing_profile;
    return sample_forcing(problem, t);
  };

  auto step_error = [&](int n, const std::exception& e) -> Error {
    std::ostringstream msg;
    msg << to_string(scheme) << " failed at step " << n << ": " << e.what();
    return Error(msg.str());
  };

  if (scheme == SchemeKind::CnFull) {
    if (problem.dims() == 1) {
      const auto op = build_direction_operator(problem.axes[0], 0, tau);
      Field u = std::move(u0);
      for (int n = 0; n < steps; ++n) {
        try {
          u = step_cn_1d(op, u, forcing_at((n + 0.5) * tau));
        } catch (const std::exception& e) {
          throw step_error(n, e);
        }
      }
      return {std::move(u), steps};
    }
    const CnSystem sys = assemble_cn(problem, tau);
    Field u = std::move(u0);
    for (int n = 0; n < steps; ++n) {
      try {
        u = step_cn_full(sys, u, forcing_at((n + 0.5) * tau));
      } catch (const std::exception& e) {
        throw step_error(n, e);
      }
    }
    return {std::move(u), steps};
  }

  if (options.bootstrap == Bootstrap::Exact && is_two_step(scheme) && !problem.exact)
    throw Error("exact bootstrap requested but the problem has no exact solution");

  SteppingState state = make_state(problem, std::move(u0));
  for (int n = 0; n < steps; ++n) {
    const double t_half = (n + 0.5) * tau;
    Field next;
    try {
      const Field f = forcing_at(t_half);
      switch (scheme) {
        case SchemeKind::PrAdi: next = step_pr_adi(state, f); break;
        case SchemeKind::DAdi:
          next = problem.dims() == 2 ? step_d_adi_2d(state, f) : step_d_adi_3d(state, f);
          break;
        case SchemeKind::Fs: next = step_fs_2d(state, f); break;
        case SchemeKind::DAdi2:
        case SchemeKind::Fs2:
          if (n == 0) {
            next = options.bootstrap == Bootstrap::Exact
                       ? sample_field(problem, Sample::Exact, tau)
                       : step_d_adi_2d(state, f);
          } else {
            next = scheme == SchemeKind::DAdi2 ? step_d_adi2_2d(state, f)
                                               : step_fs2_2d(state, f);
          }
          break;
        case SchemeKind::CnFull: break;
      }
    } catch (const std::exception& e) {
      throw step_error(n, e);
    }
    state.previous = std::move(state.current);
    state.current = std::move(next);
    state.step = n + 1;
  }
  return {std::move(state.current), steps};
}

}  // namespace fracadi
