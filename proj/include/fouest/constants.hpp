#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fouest {

// sigma^2_H = (4H - 1) + 2 Gamma(2-4H) Gamma(4H) / (Gamma(2H) Gamma(1-2H)),
// defined for H in (0, 1/2).  Both Gamma(2-4H) and Gamma(1-2H) approach a
// pole as H -> 1/2, so the ratio is taken through log-gamma differences; all
// arguments are positive on the admissible range.
template <typename Scalar = double>
Scalar sigma2(Scalar hurst) {
  using std::exp;
  using std::lgamma;
  if (!(hurst > Scalar(0) && hurst < Scalar(0.5)))
    throw std::domain_error("sigma2: hurst must lie in (0, 0.5)");
  const Scalar log_ratio = lgamma(2 - 4 * hurst) + lgamma(4 * hurst) -
                           lgamma(2 * hurst) - lgamma(1 - 2 * hurst);
  return (4 * hurst - 1) + 2 * exp(log_ratio);
}

// a = H Gamma(2H) theta^(-2H), the limit of b_T as the horizon grows.
template <typename Scalar = double>
Scalar a_limit(Scalar hurst, Scalar theta) {
  using std::pow;
  using std::tgamma;
  if (!(hurst > Scalar(0) && hurst < Scalar(1)))
    throw std::domain_error("a_limit: hurst must lie in (0, 1)");
  if (!(theta > Scalar(0))) throw std::domain_error("a_limit: theta must be > 0");
  return hurst * tgamma(2 * hurst) * pow(theta, -2 * hurst);
}

// delta_H = H^2 Gamma(2H)^2 sigma^2_H = a_limit(H, 1)^2 sigma^2_H.
template <typename Scalar = double>
Scalar delta_h(Scalar hurst) {
  const Scalar a1 = a_limit(hurst, Scalar(1));
  return a1 * a1 * sigma2(hurst);
}

// Rate exponent of the Kolmogorov-distance bound: beta = min(1 - 2H, 1/2).
inline double beta_rate(double hurst) { return std::min(1.0 - 2.0 * hurst, 0.5); }

}  // namespace fouest
