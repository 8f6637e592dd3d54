#pragma once

#include <Eigen/Dense>
#include <functional>

#include "fouest/core.hpp"

namespace fouest {

// Piecewise-constant function on a uniform grid; value i holds on cell
// [t_i, t_{i+1}).
struct StepKernel1D {
  UniformGrid grid;
  Eigen::VectorXd values;
};

// Piecewise-constant kernel on the grid squared.  `symmetric` records whether
// values(i,j) == values(j,i); the tensor-space operations expect it.
struct StepKernel2D {
  UniformGrid grid;
  Eigen::MatrixXd values;
  bool symmetric;
};

// Cell-midpoint sampling of a continuous function.
StepKernel1D sample_midpoint(const UniformGrid& grid,
                             const std::function<double(double)>& f);

StepKernel2D sample_midpoint2(const UniformGrid& grid,
                              const std::function<double(double, double)>& f);

// Rank-one kernel u (x) u.
StepKernel2D outer(const StepKernel1D& u);

}  // namespace fouest
