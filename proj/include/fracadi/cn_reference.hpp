#pragma once

#include <vector>

#include "fracadi/core_model.hpp"
#include "fracadi/frac_ops.hpp"
#include "fracadi/line_solver.hpp"

namespace fracadi {

/// One Crank-Nicolson step on a single axis:
///   (I - M) u' = (I + M) u + tau * f_half.
Field step_cn_1d(const DirectionOperator& op, const Field& u, const Field& f_half);

/// Largest interior grid accepted by the assembled (unsplit) solver.
inline constexpr std::size_t kMaxAssembledUnknowns = 1000;

/// Unsplit Crank-Nicolson system with the Kronecker sum of all direction
/// operators assembled explicitly. Oracle-scale only.
struct CnSystem {
  int dims = 0;
  std::vector<int> extents;
  double tau = 0.0;
  std::vector<DirectionOperator> directions;
  /// Per-axis Kronecker terms I x .. x M_axis x .. x I, in axis order.
  std::vector<DenseMatrix> terms;
  /// Sum of `terms`.
  DenseMatrix m;
  LuFactors factors;
};

/// Kronecker lift of a per-axis matrix to the full interior grid (x fastest).
DenseMatrix lift_to_grid(const DenseMatrix& per_axis, int axis,
                         const std::vector<int>& extents);

/// Throws Error when the interior grid exceeds kMaxAssembledUnknowns.
CnSystem assemble_cn(const Problem& problem, double tau);

/// (I - M) u' = (I + M) u + tau * f_half with the assembled M.
Field step_cn_full(const CnSystem& sys, const Field& u, const Field& f_half);

/// Dense matrix-vector product on a field's values.
Field apply_matrix(const DenseMatrix& m, const Field& u);

}  // namespace fracadi
