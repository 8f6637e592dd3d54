#pragma once

#include <Eigen/Dense>
#include <functional>

#include "fouest/core.hpp"
#include "fouest/gram.hpp"
#include "fouest/step_kernel.hpp"

namespace fouest {

// <u, v> = u' G v, the discrete inner product of step functions.
double inner_h(const StepKernel1D& u, const StepKernel1D& v, const IncrementGram& G);

// <A, B> on the tensor square, evaluated as trace(G A G B').  Kernels are
// expected symmetric; an asymmetric input is symmetrized with a warning on
// stderr since the kernels of interest are all symmetric.
double inner_h2(const StepKernel2D& A, const StepKernel2D& B, const IncrementGram& G);

// 1-contraction (A ox1 B)(t1, t2) = <A(t1, .), B(t2, .)>, i.e. the matrix
// A G B'.  Symmetric when A == B.
StepKernel2D contract1(const StepKernel2D& A, const StepKernel2D& B,
                       const IncrementGram& G);

// ||A ox1 B||^2 in the tensor square.  The contraction of two symmetric
// kernels is generally not symmetric and its raw norm is the quantity the
// normal-approximation bounds use, so this bypasses the symmetrizing path.
double contraction_norm2(const StepKernel2D& A, const StepKernel2D& B,
                         const IncrementGram& G);

// Windowed continuously differentiable function h * 1_[0, horizon].  The
// derivative is checked against a central difference of h on a probe grid at
// construction (relative error <= 1e-5).
struct SmoothWindowed1D {
  double horizon;
  std::function<double(double)> h;
  std::function<double(double)> h_prime;

  SmoothWindowed1D(double horizon, std::function<double(double)> h,
                   std::function<double(double)> h_prime);
};

// Boundary-corrected quadrature of the integration-by-parts representation
//   <f, g> = -int int h_f(t) h_g'(s) dR/dt(t,s) dt ds
//            + h_g(T) int h_f(t) dR/dt(t,T) dt - h_g(0) int h_f(t) dR/dt(t,0) dt.
// The Dirac contributions at s = 0 and s = T are explicit one-dimensional
// quadratures; the power singularities of dR/dt ride on Gauss-Jacobi rules.
double inner_h_jolis(const SmoothWindowed1D& f, const SmoothWindowed1D& g,
                     const HurstModel& model, int quad_n);

// Spectral-domain integration setup.  The oscillation scale of the transforms
// is 1/horizon, so frequency_samples must resolve the cutoff at that scale.
struct SpectralConfig {
  double frequency_cutoff;
  int frequency_samples;
  double tail_tol;  // admissible analytic bound on the truncated tail; <= 0 disables
};

// Chooses a cutoff from the analytic tail bound of the given kernels and a
// node count resolving the transforms' oscillation scale 1/horizon.
SpectralConfig spectral_config_for(const StepKernel1D& f, const StepKernel1D& g,
                                   const HurstModel& model, double tail_tol);

struct SpectralResult {
  double value;
  double tail_bound;  // bound on the dropped oscillatory tail beyond the cutoff
};

// <f, g> = c_H int Ff conj(Fg) |xi|^(1-2H) dxi with
// c_H = Gamma(2H+1) sin(pi H) / (2 pi).  Truncated at the cutoff; the
// non-oscillatory part of the tail is added in closed form and a bound on the
// dropped remainder is returned.  Throws numeric_error when the bound exceeds
// cfg.tail_tol.
SpectralResult inner_h_spectral_full(const StepKernel1D& f, const StepKernel1D& g,
                                     const HurstModel& model, const SpectralConfig& cfg);
double inner_h_spectral(const StepKernel1D& f, const StepKernel1D& g,
                        const HurstModel& model, const SpectralConfig& cfg);

// Mixed form pairing a step function with a windowed smooth function through
// the signed measure of g; the t-integral of dR/dt over each cell collapses
// to a covariance difference, so only the s-quadrature is numerical.
// Experimental cross-check only; nothing asserts against it.
double inner_h_mixed(const StepKernel1D& f, const SmoothWindowed1D& g,
                     const HurstModel& model, int quad_n);

}  // namespace fouest
