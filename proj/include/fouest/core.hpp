#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fouest {

// Problem instance: dX_t = -theta X_t dt + dB^H_t on [0, horizon], X_0 = 0.
// The statistic of interest targets hurst in (0, 1/2); the covariance layer
// is valid on all of (0, 1).
struct HurstModel {
  double hurst;
  double theta;
  double horizon;

  HurstModel(double hurst_, double theta_, double horizon_)
      : hurst(hurst_), theta(theta_), horizon(horizon_) {
    if (!(hurst > 0.0 && hurst < 1.0))
      throw std::invalid_argument("HurstModel: hurst must lie in (0, 1), got " +
                                  std::to_string(hurst_));
    if (!(theta > 0.0))
      throw std::invalid_argument("HurstModel: theta must be > 0, got " +
                                  std::to_string(theta_));
    if (!(horizon > 0.0))
      throw std::invalid_argument("HurstModel: horizon must be > 0, got " +
                                  std::to_string(horizon_));
  }

  HurstModel with_horizon(double t) const { return HurstModel(hurst, theta, t); }
};

// Uniform grid of n cells on [0, horizon].  The step is always derived from
// (n, horizon) so that step * n == horizon holds exactly.
struct UniformGrid {
  int n;
  double horizon;

  UniformGrid(int n_, double horizon_) : n(n_), horizon(horizon_) {
    if (n <= 0)
      throw std::invalid_argument("UniformGrid: n must be positive, got " +
                                  std::to_string(n_));
    if (!(horizon > 0.0))
      throw std::invalid_argument("UniformGrid: horizon must be > 0, got " +
                                  std::to_string(horizon_));
  }

  double step() const { return horizon / n; }
  double node(int i) const { return horizon * i / n; }
  double midpoint(int i) const { return horizon * (i + 0.5) / n; }
};

// fBm covariance R_H(t, s) = (|t|^2H + |s|^2H - |t-s|^2H) / 2 for t, s >= 0.
template <typename Scalar = double>
Scalar fbm_cov(Scalar hurst, Scalar t, Scalar s) {
  using std::abs;
  using std::pow;
  const Scalar two_h = 2 * hurst;
  return (pow(t, two_h) + pow(s, two_h) - pow(abs(t - s), two_h)) / 2;
}

// d/dt R_H(t, s) = H (t^(2H-1) - sgn(t-s) |t-s|^(2H-1)).  Blows up on the
// diagonal and at t = 0 when H < 1/2; those points are integrable and belong
// to the caller's quadrature rule, so they are hard errors here.
template <typename Scalar = double>
Scalar fbm_cov_dt(Scalar hurst, Scalar t, Scalar s) {
  using std::abs;
  using std::pow;
  if (t == s || t == Scalar(0))
    throw std::domain_error("fbm_cov_dt: non-integrable point t == s or t == 0");
  const Scalar e = 2 * hurst - 1;
  const Scalar sgn = t > s ? Scalar(1) : Scalar(-1);
  return hurst * (pow(t, e) - sgn * pow(abs(t - s), e));
}

inline double cov(const HurstModel& model, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::domain_error("cov: requires t, s >= 0");
  return fbm_cov(model.hurst, t, s);
}

inline double cov_partial_t(const HurstModel& model, double t, double s) {
  if (t < 0.0 || s < 0.0) throw std::domain_error("cov_partial_t: requires t, s >= 0");
  return fbm_cov_dt(model.hurst, t, s);
}

}  // namespace fouest
