#include "fracadi/cn_reference.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "fracadi/errors.hpp"

namespace fracadi {

Field step_cn_1d(const DirectionOperator& op, const Field& u, const Field& f_half) {
  if (u.dims() != 1) throw DimensionError("step_cn_1d: field must be one-dimensional");
  if (!u.same_shape(f_half)) throw DimensionError("step_cn_1d: forcing shape mismatch");
  Field rhs = u + apply_operator(op, u);
  rhs.axpy(op.tau(), f_half);
  Field next = solve_lines(op, rhs);
  next.require_finite("step_cn_1d");
  return next;
}

Field apply_matrix(const DenseMatrix& m, const Field& u) {
  Field out(u.extents());
  const auto y = multiply(m, u.values());
  std::copy(y.begin(), y.end(), out.values().begin());
  return out;
}

DenseMatrix lift_to_grid(const DenseMatrix& per_axis, int axis,
                         const std::vector<int>& extents) {
  // x is the fastest index, so it is the rightmost Kronecker factor.
  DenseMatrix result = DenseMatrix::identity(1);
  for (int a = static_cast<int>(extents.size()) - 1; a >= 0; --a) {
    const DenseMatrix factor =
        a == axis ? per_axis : DenseMatrix::identity(static_cast<std::size_t>(extents[a]));
    result = kron(result, factor);
  }
  return result;
}

CnSystem assemble_cn(const Problem& problem, double tau) {
  CnSystem sys;
  sys.dims = problem.dims();
  sys.extents = problem.extents();
  sys.tau = tau;
  std::size_t total = 1;
  for (int e : sys.extents) total *= e;
  if (total > kMaxAssembledUnknowns) {
    std::ostringstream msg;
    msg << "assembled Crank-Nicolson system limited to " << kMaxAssembledUnknowns
        << " unknowns, requested " << total;
    throw Error(msg.str());
  }

  sys.m = DenseMatrix(total, total);
  for (int a = 0; a < sys.dims; ++a) {
    sys.directions.push_back(build_direction_operator(problem.axes[a], a, tau));
    sys.terms.push_back(lift_to_grid(sys.directions.back().matrix(), a, sys.extents));
    sys.m += sys.terms.back();
  }

  // The Kronecker sum must reproduce the line-by-line application.
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Field probe(sys.extents);
  for (double& v : probe.values()) v = dist(rng);
  Field lines(sys.extents);
  for (const auto& op : sys.directions) lines += apply_operator(op, probe);
  const Field assembled = apply_matrix(sys.m, probe);
  const double scale = std::max(1.0, assembled.max_abs());
  for (std::size_t k = 0; k < total; ++k)
    if (std::abs(assembled.values()[k] - lines.values()[k]) > 1e-13 * scale)
      throw Error("assembled operator disagrees with line application");

  sys.factors = lu_factor(DenseMatrix::identity(total) - sys.m);
  return sys;
}

Field step_cn_full(const CnSystem& sys, const Field& u, const Field& f_half) {
  if (u.extents() != sys.extents || !u.same_shape(f_half))
    throw DimensionError("step_cn_full: field shape does not match system");
  Field rhs = u + apply_matrix(sys.m, u);
  rhs.axpy(sys.tau, f_half);
  const auto x = lu_solve(sys.factors, rhs.values());
  Field next(sys.extents);
  std::copy(x.begin(), x.end(), next.values().begin());
  next.require_finite("step_cn_full");
  return next;
}

}  // namespace fracadi
