#pragma once

#include <Eigen/Dense>

#include "fouest/core.hpp"

namespace fouest {

// Covariance matrix of the fBm increments on a uniform grid,
// entries(i, j) = E[(B_{t_{i+1}} - B_{t_i})(B_{t_{j+1}} - B_{t_j})].
// This matrix carries the discrete geometry of the Hilbert space: step
// functions u, v on the grid satisfy <u, v> = u' G v.
struct IncrementGram {
  UniformGrid grid;
  double hurst;
  Eigen::MatrixXd entries;

  int n() const { return grid.n; }
};

// Assembles the Gram matrix from second differences of the covariance,
// entry (i,j) = R(t_{i+1}, t_{j+1}) - R(t_{i+1}, t_j) - R(t_i, t_{j+1}) + R(t_i, t_j).
// Node covariances are combined in long double and the result is symmetrized
// by averaging with its transpose.  Requires grid.horizon == model.horizon.
IncrementGram increment_gram(const HurstModel& model, const UniformGrid& grid);

}  // namespace fouest
