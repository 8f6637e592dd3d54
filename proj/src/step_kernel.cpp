#include "fouest/step_kernel.hpp"

namespace fouest {

StepKernel1D sample_midpoint(const UniformGrid& grid,
                             const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid.n);
  for (int i = 0; i < grid.n; ++i) v[i] = f(grid.midpoint(i));
  return {grid, std::move(v)};
}

StepKernel2D sample_midpoint2(const UniformGrid& grid,
                              const std::function<double(double, double)>& f) {
  Eigen::MatrixXd v(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) v(i, j) = f(grid.midpoint(i), grid.midpoint(j));
  const double scale = v.cwiseAbs().maxCoeff();
  const bool sym = (v - v.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (scale > 0 ? scale : 1.0);
  return {grid, std::move(v), sym};
}

StepKernel2D outer(const StepKernel1D& u) {
  Eigen::MatrixXd v = u.values * u.values.transpose();
  return {u.grid, std::move(v), true};
}

}  // namespace fouest
