#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fracadi/core_model.hpp"
#include "fracadi/frac_ops.hpp"
#include "fracadi/line_solver.hpp"
#include "fracadi/splitting_schemes.hpp"

namespace fracadi {

/// Maximum-norm error over interior nodes.
double max_error(const Field& numeric, const Field& exact);

/// log2(e_coarse / e_fine) for a halving refinement.
double observed_rate(double e_coarse, double e_fine);

/// (A + A^T) / 2.
DenseMatrix hermitian_part(const DenseMatrix& a);

/// Outcome of the numerical stability checks for one operator or problem.
///
/// Every check is recorded by name; the report passes only when all of them
/// do. Quantities that were not computed stay empty.
struct SpectralReport {
  std::string id;
  std::optional<std::size_t> q;
  std::optional<double> mu;
  std::optional<double> lambda_max_h;
  std::optional<double> gerschgorin_max_radius;
  std::optional<double> gerschgorin_limit;  // -g_1
  std::optional<double> inverse_norm;       // ||(I-M)^-1||
  std::optional<double> cn_norm;            // ||(I-M)^-1 (I+M)||
  std::optional<double> spectral_radius;
  std::optional<double> power_radius;
  std::optional<int> power_iterations;
  std::optional<double> companion_root_radius;
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<std::string> notes;

  void check(std::string name, bool ok) { checks.emplace_back(std::move(name), ok); }
  bool passed() const;
  /// Flat "key = value" block, one entry per line, ending with "passed".
  std::string to_key_value() const;
};

/// lambda_max of H = (A + A^T)/2, the Gerschgorin radii of H against -g_1
/// and, unless d1 == d2 == 1, lambda_max of the symmetric part of
/// d1*A + d2*A^T. Requires q <= 256.
SpectralReport verify_definiteness(FracOrder mu, std::size_t q, double d1 = 1.0,
                                   double d2 = 1.0);

/// ||(I-M)^-1|| and ||(I-M)^-1 (I+M)|| from explicit inverses. The operator
/// must have constant coefficients and size <= 128.
SpectralReport verify_norm_bounds(const DirectionOperator& op);

struct RadiusEstimate {
  double radius = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Spectral radius by four-vector subspace (power) iteration with a
/// Rayleigh-Ritz step, which also captures repeated complex-conjugate
/// dominant pairs.
RadiusEstimate spectral_radius(const DenseMatrix& t, double tol = 1e-8,
                               int max_iterations = 10000);

/// Assembled one-step iteration matrix of `scheme` on `problem` (at most 500
/// interior unknowns). Two-step schemes give the companion [[P+Q, -Q], [I, 0]].
DenseMatrix iteration_matrix(const Problem& problem, SchemeKind scheme);

/// Spectral radius of the iteration matrix from a dense eigensolve, with the
/// power-iteration estimate alongside; for D-ADI-II / FS-II also the
/// per-mode root condition |b| < 1 + c < 2 with b, c the paired eigenvalues
/// of P+Q and Q (Riesz form with constant coefficients).
SpectralReport verify_iteration_spectrum(const Problem& problem, SchemeKind scheme);

/// Paired eigenvalues (b_k, c_k) of P+Q and Q over the joint eigenbasis of
/// the two symmetric direction operators.
std::vector<std::pair<double, double>> companion_mode_pairs(const DirectionOperator& ox,
                                                            const DirectionOperator& oy);

}  // namespace fracadi
