#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracadi/core_model.hpp"
#include "fracadi/splitting_schemes.hpp"

namespace fracadi {

// ---------------------------------------------------------------------------
// Problem catalog

enum class CatalogId { P1d, P2d, P3d, Riesz2d };

std::string to_string(CatalogId id);
CatalogId parse_catalog(std::string_view name);

struct CatalogParams {
  double alpha = 1.5;
  double beta = 1.5;
  double gamma = 1.5;
};

struct CatalogEntry {
  CatalogId id;
  int dims;
  double lo;
  double hi;
  double t_end;
};

const CatalogEntry& catalog_entry(CatalogId id);

/// Problem with `n` intervals per axis and `n_steps` time steps up to
/// `t_end` (catalog default when empty).
Problem make_problem(CatalogId id, const CatalogParams& params, int n, int n_steps,
                     std::optional<double> t_end = std::nullopt);

/// Constant coefficients on the unit square/cube, zero forcing and
/// u0 = prod 16 s^2 (1 - s)^2. Used by stability and algebra checks.
Problem make_constant_problem(int dims, double mu, int n, int n_steps, double t_end,
                              double d1 = 1.0, double d2 = 1.0, double kappa = 0.0);

// ---------------------------------------------------------------------------
// Forcing construction

/// Left Riemann-Liouville derivative of order mu in (1, 2) at x, for a
/// function with f(0) = f'(0) = 0, given its second derivative:
///   (1 / Gamma(2 - mu)) * int_0^x s^(1-mu) f''(x - s) ds.
/// The weakly singular end is mapped away by w = s^(2-mu); the rest uses
/// composite 30-point Gauss-Legendre panels.
double left_rl_derivative(const std::function<double(double)>& second_derivative,
                          double x, double mu);

/// sin((2s)^4) sin((2-2s)^4) and its second derivative.
double riesz_profile(double s);
double riesz_profile_d2(double s);

/// Spatial part S of the p3d forcing f = e^-t S(x, y, z).
SpaceFn build_forcing_3d(double alpha, double beta, double gamma);

struct OracleResult {
  Field values;
  /// Max difference between the two extrapolated estimates.
  double discrepancy = 0.0;
};

/// f = u_t - L u at the interior nodes of `axes` and time t. Each axis term
/// of L is applied by the second-order discrete operator on lines refined
/// by r, 2r, 4r and 8r through every coarse node, then extrapolated twice:
/// once for the h^2 term and once for the h^(4-mu) term that the zero
/// extension at the boundary introduces. Estimates from (r, 2r, 4r) and
/// (2r, 4r, 8r) must agree to `tolerance`, otherwise Error reports the
/// measured discrepancy. u_t uses a fourth-order central difference in time.
OracleResult forcing_oracle(const SpaceTimeFn& exact, const std::vector<AxisSpec>& axes,
                            int r, double t = 0.0, double tolerance = 1e-7);

// ---------------------------------------------------------------------------
// Configuration

enum class TableFormat { Csv, Markdown };

std::string to_string(TableFormat f);
TableFormat parse_format(std::string_view name);

struct RunConfig {
  std::string name;  ///< section name, used as the series label
  CatalogId problem = CatalogId::P1d;
  double alpha = 1.5;
  double beta = 1.5;
  double gamma = 1.5;
  SchemeKind scheme = SchemeKind::CnFull;
  int n = 10;               ///< intervals per axis
  double nt_ratio = 1.0;    ///< tau / dx
  std::optional<double> t_end;
  std::string output;       ///< empty: standard output
  TableFormat format = TableFormat::Csv;
  std::vector<int> levels;  ///< 1/dx per refinement level
  std::vector<double> ratios;
  /// Unset: D-ADI for plain runs, exact for the splitting comparison.
  std::optional<Bootstrap> bootstrap;

  CatalogParams params() const { return {alpha, beta, gamma}; }
  std::string label() const;
};

/// Applies one `key = value` setting; throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

/// Throws InadmissibleSchemeError when the scheme cannot run on the problem.
void validate_config(const RunConfig& cfg);

/// Flat `key = value` text. Lines before the first `[section]` are defaults
/// for every section; `#` starts a comment. Returns one config per section
/// (or one when there are no sections), each validated.
std::vector<RunConfig> parse_config(std::string_view text);
std::vector<RunConfig> load_config(const std::string& path);

/// Number of time steps for spacing `dx` and ratio tau/dx, checked to be
/// an integer.
int steps_for(double t_end, double dx, double ratio);

// ---------------------------------------------------------------------------
// Studies and tables

struct ConvergenceRecord {
  std::string series;
  int level = 0;  ///< 1/dx
  double delta = 0.0;
  double tau = 0.0;
  std::optional<double> error;
  std::optional<double> rate;
  std::string failure;  ///< empty when the row ran and its rate is sound
};

/// One run per level with tau = nt_ratio * dx. Run failures are recorded on
/// the row and the study continues. Consecutive equal levels yield rate 0
/// with a degenerate-input failure.
std::vector<ConvergenceRecord> run_convergence_study(const RunConfig& cfg);

struct SplittingTable {
  std::vector<double> ratios;
  std::vector<SchemeKind> schemes;
  /// errors[s][k]: scheme s at ratio k.
  std::vector<std::vector<double>> errors;
  /// max |D-ADI-II - FS-II| over all ratios.
  double equivalence_gap = 0.0;
};

/// D-ADI, D-ADI-II and FS-II on riesz2d at fixed dx for each ratio. Throws
/// Error when D-ADI-II and FS-II differ by more than 1e-13.
SplittingTable run_splitting_comparison(const RunConfig& cfg);

/// Columns level, delta, tau, error, rate; with several series the table
/// is widened to one error/rate pair per series.
std::string emit_table(const std::vector<ConvergenceRecord>& records, TableFormat format);
std::string emit_splitting_table(const SplittingTable& table, TableFormat format);

/// Interior nodes and values, one row per node: x[, y[, z]], u.
std::string emit_field(const std::vector<AxisSpec>& axes, const Field& field);

}  // namespace fracadi
