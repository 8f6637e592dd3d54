#pragma once

#include "fouest/core.hpp"
#include "fouest/gram.hpp"
#include "fouest/step_kernel.hpp"

namespace fouest {

// The second-chaos kernels of the normalized estimator statistic:
//   f(t,s) = exp(-theta |t-s|) / (2 sqrt(theta sigma2 T)),
//   h(t,s) = exp(-theta (T-t) - theta (T-s)),
//   g = alpha f - beta h   with alpha = sqrt(sigma2/(theta T)), beta = 1/(2 theta T).
// All three are symmetric on [0, T]^2.
struct KernelFamily {
  HurstModel model;
  double sigma2_h;

  double f_scale() const;  // 1 / (2 sqrt(theta sigma2 T))
  double alpha() const;
  double beta() const;

  double f(double t, double s) const;
  double g(double t, double s) const;
  double h(double t, double s) const;

  StepKernel2D sample_f(const UniformGrid& grid) const;
  StepKernel2D sample_g(const UniformGrid& grid) const;
  StepKernel2D sample_h(const UniformGrid& grid) const;
  // 1-D factor of the rank-one kernel h = k (x) k, k(t) = exp(-theta (T-t))
  StepKernel1D sample_h_factor(const UniformGrid& grid) const;
};

KernelFamily kernel_family(const HurstModel& model);

// b_T = (1/T) int_0^T || exp(-theta(t-.)) 1_[0,t] ||^2 dt.

struct BtDetail {
  double value;
  double b1;  // transient part, O(1/T)
  double b2;  // part converging to a_limit
  double error_estimate;
};

// Quadrature route through the closed 1-D reduction
//   b1 = H/(2 theta T) [ int_0^T e^(-theta u) u^(2H-1) du
//                        - int_0^T e^(-theta (2T-u)) u^(2H-1) du ],
//   b2 = H int_0^T e^(-theta z) z^(2H-1) dz - (H/T) int_0^T e^(-theta z) z^(2H) dz,
// with the endpoint singularity handled by Gauss-Jacobi weights.
BtDetail bt_quadrature_detail(const HurstModel& model, double tol);
double bt_quadrature(const HurstModel& model, double tol = 1e-10);

// Gram-matrix route: trapezoid over grid nodes t_q of <k_q, k_q> with
// k_q the cell-sampled kernel exp(-theta(t_q - .)) 1_[0, t_q].  Serves as an
// independent oracle for bt_quadrature.
double bt_gram(const HurstModel& model, const UniformGrid& grid);
double bt_gram(const HurstModel& model, const IncrementGram& gram);

}  // namespace fouest
