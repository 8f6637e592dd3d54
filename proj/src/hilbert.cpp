#include "fouest/hilbert.hpp"

#include <cmath>
#include <cstdio>
#include <complex>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fouest/errors.hpp"
#include "fouest/quadrature.hpp"

namespace fouest {

namespace {

void require_same_n(int a, int b, const char* who) {
  if (a != b)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

Eigen::MatrixXd symmetric_values(const StepKernel2D& A, const char* who) {
  if (A.symmetric) return A.values;
  std::cerr << who << ": asymmetric kernel symmetrized (likely a caller bug)\n";
  return ((A.values + A.values.transpose()) / 2.0).eval();
}

}  // namespace

double inner_h(const StepKernel1D& u, const StepKernel1D& v, const IncrementGram& G) {
  require_same_n(static_cast<int>(u.values.size()), G.n(), "inner_h");
  require_same_n(static_cast<int>(v.values.size()), G.n(), "inner_h");
  return u.values.dot(G.entries * v.values);
}

double inner_h2(const StepKernel2D& A, const StepKernel2D& B, const IncrementGram& G) {
  require_same_n(static_cast<int>(A.values.rows()), G.n(), "inner_h2");
  require_same_n(static_cast<int>(B.values.rows()), G.n(), "inner_h2");
  const Eigen::MatrixXd a = symmetric_values(A, "inner_h2");
  const Eigen::MatrixXd b = symmetric_values(B, "inner_h2");
  const Eigen::MatrixXd gag = G.entries * a * G.entries;
  return gag.cwiseProduct(b).sum();
}

StepKernel2D contract1(const StepKernel2D& A, const StepKernel2D& B,
                       const IncrementGram& G) {
  require_same_n(static_cast<int>(A.values.rows()), G.n(), "contract1");
  require_same_n(static_cast<int>(B.values.rows()), G.n(), "contract1");
  const Eigen::MatrixXd a = symmetric_values(A, "contract1");
  const Eigen::MatrixXd b = symmetric_values(B, "contract1");
  Eigen::MatrixXd c = a * G.entries * b.transpose();
  const double scale = c.cwiseAbs().maxCoeff();
  const bool sym =
      (c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (scale > 0 ? scale : 1.0);
  return {A.grid, std::move(c), sym};
}

double contraction_norm2(const StepKernel2D& A, const StepKernel2D& B,
                         const IncrementGram& G) {
  require_same_n(static_cast<int>(A.values.rows()), G.n(), "contraction_norm2");
  require_same_n(static_cast<int>(B.values.rows()), G.n(), "contraction_norm2");
  const Eigen::MatrixXd a = symmetric_values(A, "contraction_norm2");
  const Eigen::MatrixXd b = symmetric_values(B, "contraction_norm2");
  const Eigen::MatrixXd c = a * G.entries * b.transpose();
  // ||C||^2 = trace(G C G C') = sum (G C) o (C G)
  const Eigen::MatrixXd gc = G.entries * c;
  const Eigen::MatrixXd cg = c * G.entries;
  return gc.cwiseProduct(cg).sum();
}

SmoothWindowed1D::SmoothWindowed1D(double horizon_, std::function<double(double)> h_,
                                   std::function<double(double)> h_prime_)
    : horizon(horizon_), h(std::move(h_)), h_prime(std::move(h_prime_)) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("SmoothWindowed1D: horizon must be > 0");
  // step balances truncation against cancellation for horizons of any size
  const double eps = horizon * 1e-4;
  double scale = 0.0;
  for (int k = 1; k < 16; ++k) scale = std::max(scale, std::abs(h_prime(horizon * k / 16)));
  for (int k = 1; k < 16; ++k) {
    const double x = horizon * k / 16;
    const double cd = (h(x + eps) - h(x - eps)) / (2.0 * eps);
    if (std::abs(cd - h_prime(x)) > 1e-5 * std::max(scale, 1e-12)) {
      char at[32];
      std::snprintf(at, sizeof(at), "%g", x);
      throw std::invalid_argument(
          std::string("SmoothWindowed1D: h_prime inconsistent with h near t = ") + at);
    }
  }
}

namespace {

struct JolisParts {
  double interior;
  double boundary_T;
  double boundary_0;
};

// Shared core of the integration-by-parts route.  With
// W0    = int_0^T h_f(t) t^(2H-1) dt,
// Wp(s) = int_s^T h_f(t) (t-s)^(2H-1) dt,
// Wm(s) = int_0^s h_f(t) (s-t)^(2H-1) dt,
// the inner integral is A(s) = H (W0 - Wp(s) + Wm(s)) and
//   <f, g> = -int_0^T A(s) h_g'(s) ds + h_g(T) A(T) - h_g(0) A(0).
JolisParts jolis_parts(const SmoothWindowed1D& f, const SmoothWindowed1D& g,
                       const HurstModel& model, int quad_n) {
  const double T = f.horizon;
  const double H = model.hurst;
  const double beta = 2.0 * H - 1.0;
  const GaussRule jac = gauss_jacobi01(quad_n, beta);
  const GaussRule leg = gauss_legendre(std::min(quad_n, 16));

  const double w0 = apply_power_weighted(jac, f.h, 0.0, T, beta);
  auto w_plus = [&](double s) {
    return apply_power_weighted(
        jac, [&](double z) { return f.h(s + z); }, 0.0, T - s, beta);
  };
  auto w_minus = [&](double s) {
    return apply_power_weighted(
        jac, [&](double z) { return f.h(s - z); }, 0.0, s, beta);
  };
  auto inner_a = [&](double s) { return H * (w0 - w_plus(s) + w_minus(s)); };

  double interior = 0.0;
  for (const auto& [lo, hi] : graded_panels(0.0, T, 24)) {
    const double piece =
        leg.apply([&](double s) { return inner_a(s) * g.h_prime(s); }, lo, hi);
    if (!std::isfinite(piece))
      throw numeric_error("inner_h_jolis: non-finite value on panel [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    interior -= piece;
  }
  const double boundary_T = g.h(T) * H * (w0 + w_minus(T));
  const double boundary_0 = -g.h(0.0) * H * (w0 - w_plus(0.0));
  if (!std::isfinite(boundary_T) || !std::isfinite(boundary_0))
    throw numeric_error("inner_h_jolis: non-finite boundary term");
  return {interior, boundary_T, boundary_0};
}

}  // namespace

double inner_h_jolis(const SmoothWindowed1D& f, const SmoothWindowed1D& g,
                     const HurstModel& model, int quad_n) {
  if (quad_n < 16) throw std::invalid_argument("inner_h_jolis: quad_n must be >= 16");
  if (f.horizon != g.horizon || f.horizon != model.horizon)
    throw std::invalid_argument("inner_h_jolis: horizons disagree");
  const JolisParts p = jolis_parts(f, g, model, quad_n);
  return p.interior + p.boundary_T + p.boundary_0;
}

namespace {

// Jump coefficients of a step function at the grid nodes: f = sum_j a_j H(t - t_j)
// up to the right endpoint, so Ff(xi) = (1/(i xi)) sum_j a_j exp(-i xi t_j).
Eigen::VectorXd jump_coefficients(const StepKernel1D& f) {
  const int n = f.grid.n;
  Eigen::VectorXd a(n + 1);
  a[0] = f.values[0];
  for (int j = 1; j < n; ++j) a[j] = f.values[j] - f.values[j - 1];
  a[n] = -f.values[n - 1];
  return a;
}

}  // namespace

SpectralConfig spectral_config_for(const StepKernel1D& f, const StepKernel1D& g,
                                   const HurstModel& model, double tail_tol) {
  const double T = f.grid.horizon;
  const double H = model.hurst;
  const double dt = f.grid.step();
  const Eigen::VectorXd a = jump_coefficients(f);
  const Eigen::VectorXd b = jump_coefficients(g);
  const double c_h = std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H) /
                     (2.0 * std::numbers::pi);
  double pair_sum = 0.0;
  for (int j = 0; j < a.size(); ++j)
    for (int k = 0; k < b.size(); ++k)
      if (j != k) pair_sum += std::abs(a[j] * b[k]) / (dt * std::abs(j - k));
  // 4 c_H P cutoff^-(1+2H) <= tail_tol / 2
  const double cutoff = std::pow(8.0 * c_h * std::max(pair_sum, 1e-30) / tail_tol,
                                 1.0 / (1.0 + 2.0 * H));
  const double w0 = std::numbers::pi / T;
  const int uniform_panels = static_cast<int>(std::ceil(std::max(cutoff - w0, 0.0) / w0));
  return {std::max(cutoff, 2.0 * w0), 8 * (uniform_panels + 8), tail_tol};
}

SpectralResult inner_h_spectral_full(const StepKernel1D& f, const StepKernel1D& g,
                                     const HurstModel& model, const SpectralConfig& cfg) {
  if (f.grid.n != g.grid.n || f.grid.horizon != g.grid.horizon)
    throw std::invalid_argument("inner_h_spectral: kernels on different grids");
  if (!(cfg.frequency_cutoff > 0.0) || cfg.frequency_samples < 64)
    throw std::invalid_argument("inner_h_spectral: invalid spectral config");
  const double T = f.grid.horizon;
  const double H = model.hurst;
  const double dt = f.grid.step();
  const double cutoff = cfg.frequency_cutoff;
  const double c_h = std::tgamma(2.0 * H + 1.0) * std::sin(std::numbers::pi * H) /
                     (2.0 * std::numbers::pi);

  const Eigen::VectorXd a = jump_coefficients(f);
  const Eigen::VectorXd b = jump_coefficients(g);
  const int nj = static_cast<int>(a.size());

  // Re(Ff conj(Fg))(xi) = (1/xi^2) sum_{j,k} a_j b_k cos(xi (t_j - t_k))
  auto integrand = [&](double xi) {
    const std::complex<double> rot(std::cos(xi * dt), -std::sin(xi * dt));
    std::complex<double> phase(1.0, 0.0);
    std::complex<double> sf(0.0, 0.0), sg(0.0, 0.0);
    for (int j = 0; j < nj; ++j) {
      sf += a[j] * phase;
      sg += b[j] * phase;
      phase *= rot;
    }
    const double re = (sf * std::conj(sg)).real();
    return re / (xi * xi) * std::pow(xi, 1.0 - 2.0 * H);
  };

  // panels: geometric refinement toward 0 on the first oscillation, then
  // uniform panels sized by the node budget (must resolve cos(xi T))
  const double w0 = std::min(std::numbers::pi / T, cutoff);
  const int uniform_panels = std::max(1, cfg.frequency_samples / 8 - 8);
  const double width = (cutoff - w0) / uniform_panels;
  if (width > std::numbers::pi / T * 1.0000001)
    throw std::invalid_argument(
        "inner_h_spectral: frequency_samples too small to resolve the cutoff "
        "(needs >= 8 nodes per pi/horizon)");
  std::vector<std::pair<double, double>> panels;
  double edge = w0;
  for (int k = 0; k < 8; ++k) {
    panels.emplace_back(edge / 2.0, edge);
    edge /= 2.0;
  }
  panels.emplace_back(0.0, edge);
  for (int p = 0; p < uniform_panels; ++p)
    panels.emplace_back(w0 + p * width, w0 + (p + 1) * width);

  const GaussRule leg = gauss_legendre(8);
  double numeric = 0.0;
  for (const auto& [lo, hi] : panels) {
    const double piece = leg.apply(integrand, lo, hi);
    if (!std::isfinite(piece))
      throw numeric_error("inner_h_spectral: non-finite value on panel [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    numeric += piece;
  }

  // analytic tail of the non-oscillatory (j == k) part, bound on the rest
  const double s_diag = a.dot(b);
  const double diag_tail = s_diag * std::pow(cutoff, -2.0 * H) / (2.0 * H);
  double pair_sum = 0.0;
  for (int j = 0; j < nj; ++j)
    for (int k = 0; k < nj; ++k)
      if (j != k) pair_sum += std::abs(a[j] * b[k]) / (dt * std::abs(j - k));
  const double tail_bound = 4.0 * c_h * pair_sum * std::pow(cutoff, -(1.0 + 2.0 * H));

  if (cfg.tail_tol > 0.0 && tail_bound > cfg.tail_tol)
    throw numeric_error("inner_h_spectral: cutoff " + std::to_string(cutoff) +
                        " too small, tail bound " + std::to_string(tail_bound) +
                        " exceeds tolerance " + std::to_string(cfg.tail_tol));
  return {2.0 * c_h * (numeric + diag_tail), tail_bound};
}

double inner_h_spectral(const StepKernel1D& f, const StepKernel1D& g,
                        const HurstModel& model, const SpectralConfig& cfg) {
  return inner_h_spectral_full(f, g, model, cfg).value;
}

double inner_h_mixed(const StepKernel1D& f, const SmoothWindowed1D& g,
                     const HurstModel& model, int quad_n) {
  if (quad_n < 16) throw std::invalid_argument("inner_h_mixed: quad_n must be >= 16");
  const double T = f.grid.horizon;
  const int n = f.grid.n;
  // Phi(s) = int_0^T f(t) dR/dt(t, s) dt collapses cell by cell to covariance
  // differences: Phi(s) = sum_i f_i (R(t_{i+1}, s) - R(t_i, s)).
  auto phi = [&](double s) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      acc += f.values[i] *
             (fbm_cov(model.hurst, f.grid.node(i + 1), s) -
              fbm_cov(model.hurst, f.grid.node(i), s));
    return acc;
  };
  const GaussRule leg = gauss_legendre(std::min(quad_n, 16));
  double interior = 0.0;
  for (int i = 0; i < n; ++i)
    interior -= leg.apply([&](double s) { return phi(s) * g.h_prime(s); },
                          f.grid.node(i), f.grid.node(i + 1));
  return interior + g.h(T) * phi(T) - g.h(0.0) * phi(0.0);
}

}  // namespace fouest
