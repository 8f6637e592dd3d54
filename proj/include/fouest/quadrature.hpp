#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace fouest {

using ScalarFn = std::function<double(double)>;

// Nodes and weights of a Gauss rule on [0, 1].  For gauss_jacobi01 the
// weights absorb the factor x^beta, i.e. sum_i w_i f(x_i) ~ int_0^1 f(x) x^beta dx.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  // integral of f(x) over [lo, hi] (weight already in the rule)
  double apply(const ScalarFn& f, double lo, double hi) const;
};

GaussRule gauss_legendre(int n);

// Weight x^beta on [0, 1], beta > -1 (Golub-Welsch on the Jacobi recurrence).
GaussRule gauss_jacobi01(int n, double beta);

// integral of f(x) (x - lo)^beta over [lo, hi] using a precomputed Jacobi rule;
// the affine map scales the power weight exactly.
double apply_power_weighted(const GaussRule& jacobi, const ScalarFn& f, double lo,
                            double hi, double beta);

// Panels on [lo, hi] geometrically graded toward both endpoints, finest panel
// width about (hi-lo)/ratio^levels on each side.
std::vector<std::pair<double, double>> graded_panels(double lo, double hi, int levels,
                                                     double ratio = 2.0);

// Composite Gauss-Legendre over explicit panels.
double integrate_panels(const ScalarFn& f,
                        const std::vector<std::pair<double, double>>& panels,
                        const GaussRule& rule);

// Adaptive evaluation of int_lo^hi f(x) (x - lo)^beta dx by doubling the node
// count until two successive values differ by at most tol.  Returns the value
// and the last observed change; throws numeric_error if the budget runs out
// or an intermediate is non-finite.
struct QuadResult {
  double value;
  double error_estimate;
};
QuadResult integrate_power_weighted_adaptive(const ScalarFn& f, double lo, double hi,
                                             double beta, double tol,
                                             int max_nodes = 4096);

}  // namespace fouest
