#pragma once

#include <random>
#include <vector>

#include "fracadi/cn_reference.hpp"
#include "fracadi/core_model.hpp"
#include "fracadi/line_solver.hpp"

namespace fracadi::testing {

inline Field random_field(std::vector<int> extents, std::mt19937_64& rng, double scale = 1.0) {
  Field f(std::move(extents));
  std::uniform_real_distribution<double> d(-scale, scale);
  for (double& v : f.values()) v = d(rng);
  return f;
}

inline DenseMatrix random_matrix(std::size_t n, std::mt19937_64& rng, double diag_boost = 0.0) {
  DenseMatrix m(n, n);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = d(rng);
    m(i, i) += diag_boost;
  }
  return m;
}

inline Field to_field(const std::vector<int>& extents, const std::vector<double>& v) {
  Field f(extents);
  std::copy(v.begin(), v.end(), f.values().begin());
  return f;
}

/// Per-axis Kronecker lifts of the direction matrices of `problem` at `tau`.
inline std::vector<DenseMatrix> lifted_operators(const Problem& problem, double tau) {
  std::vector<DenseMatrix> out;
  for (int ax = 0; ax < problem.dims(); ++ax) {
    const DirectionOperator op = build_direction_operator(problem.axes[ax], ax, tau);
    out.push_back(lift_to_grid(op.matrix(), ax, problem.extents()));
  }
  return out;
}

}  // namespace fracadi::testing
