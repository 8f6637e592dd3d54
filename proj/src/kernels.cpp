#include "fouest/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "fouest/constants.hpp"
#include "fouest/errors.hpp"
#include "fouest/quadrature.hpp"

namespace fouest {

double KernelFamily::f_scale() const {
  return 1.0 / (2.0 * std::sqrt(model.theta * sigma2_h * model.horizon));
}
double KernelFamily::alpha() const {
  return std::sqrt(sigma2_h / (model.theta * model.horizon));
}
double KernelFamily::beta() const { return 1.0 / (2.0 * model.theta * model.horizon); }

double KernelFamily::f(double t, double s) const {
  return f_scale() * std::exp(-model.theta * std::abs(t - s));
}
double KernelFamily::h(double t, double s) const {
  // (T-t) + (T-s) keeps the evaluation bit-symmetric in (t, s)
  return std::exp(-model.theta * ((model.horizon - t) + (model.horizon - s)));
}
double KernelFamily::g(double t, double s) const {
  return alpha() * f(t, s) - beta() * h(t, s);
}

StepKernel2D KernelFamily::sample_f(const UniformGrid& grid) const {
  // f is Toeplitz in the cell index: value depends on |i-j| only
  const int n = grid.n;
  Eigen::VectorXd lag(n);
  for (int k = 0; k < n; ++k) lag[k] = f_scale() * std::exp(-model.theta * grid.step() * k);
  Eigen::MatrixXd v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = lag[std::abs(i - j)];
  return {grid, std::move(v), true};
}

StepKernel1D KernelFamily::sample_h_factor(const UniformGrid& grid) const {
  Eigen::VectorXd v(grid.n);
  for (int i = 0; i < grid.n; ++i)
    v[i] = std::exp(-model.theta * (model.horizon - grid.midpoint(i)));
  return {grid, std::move(v)};
}

StepKernel2D KernelFamily::sample_h(const UniformGrid& grid) const {
  return outer(sample_h_factor(grid));
}

StepKernel2D KernelFamily::sample_g(const UniformGrid& grid) const {
  StepKernel2D fk = sample_f(grid);
  const StepKernel2D hk = sample_h(grid);
  Eigen::MatrixXd v = alpha() * fk.values - beta() * hk.values;
  return {grid, std::move(v), true};
}

KernelFamily kernel_family(const HurstModel& model) {
  return KernelFamily{model, sigma2(model.hurst)};
}

namespace {

// int_0^T e^(-theta z) z^(2H-1) p(z) dz with p polynomially bounded.  The
// integrand is negligible beyond z0 = 60/theta; the dropped tail is bounded
// in closed form and folded into the error estimate.
QuadResult decaying_power_integral(double theta, double horizon, double beta,
                                   const ScalarFn& p, double p_tail_power, double tol) {
  const double z0 = std::min(horizon, 60.0 / theta);
  QuadResult head = integrate_power_weighted_adaptive(
      [&](double z) { return std::exp(-theta * z) * p(z); }, 0.0, z0, beta, tol);
  if (z0 < horizon) {
    const double pw = beta + p_tail_power + 1.0;
    head.error_estimate += std::exp(-theta * z0) * std::pow(horizon, pw) / pw;
  }
  return head;
}

}  // namespace

BtDetail bt_quadrature_detail(const HurstModel& model, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bt_quadrature: tol must be > 0");
  const double H = model.hurst;
  const double theta = model.theta;
  const double T = model.horizon;
  const double beta = 2.0 * H - 1.0;
  const double tol8 = tol / 8.0;

  // I_a = int_0^T e^(-theta u) u^(2H-1) du
  const QuadResult ia =
      decaying_power_integral(theta, T, beta, [](double) { return 1.0; }, 0.0, tol8);
  // I_c = int_0^T e^(-theta z) z^(2H) dz
  const QuadResult ic =
      decaying_power_integral(theta, T, beta, [](double z) { return z; }, 1.0, tol8);
  // I_b = int_0^T e^(-theta (2T-u)) u^(2H-1) du.  After u -> T - v the
  // exponential decays in v and the power weight sits at v = T, where the
  // integrand is already down by e^(-theta T); beyond v0 = 60/theta the rest
  // is bounded, not integrated.
  QuadResult ib{0.0, 0.0};
  {
    const double v0 = std::min(T, 60.0 / theta);
    if (v0 >= T) {
      ib = integrate_power_weighted_adaptive(
          [&](double u) { return std::exp(-theta * (2.0 * T - u)); }, 0.0, T, beta,
          tol8);
    } else {
      const GaussRule leg = gauss_legendre(32);
      const int panels = static_cast<int>(std::ceil(theta * v0 / 6.0)) + 1;
      for (int q = 0; q < panels; ++q) {
        ib.value += leg.apply(
            [&](double v) {
              return std::exp(-theta * (T + v)) * std::pow(T - v, beta);
            },
            v0 * q / panels, v0 * (q + 1) / panels);
      }
      ib.error_estimate =
          std::exp(-theta * (T + v0)) * std::pow(T - v0, beta + 1.0) / (beta + 1.0);
    }
  }

  const double b1 = H / (2.0 * theta * T) * (ia.value - ib.value);
  const double b2 = H * ia.value - H / T * ic.value;
  const double err = ia.error_estimate + ic.error_estimate + ib.error_estimate;
  const double value = b1 + b2;
  if (!(value > 0.0) || !std::isfinite(value))
    throw numeric_error("bt_quadrature: non-positive or non-finite value");
  return {value, b1, b2, err};
}

double bt_quadrature(const HurstModel& model, double tol) {
  return bt_quadrature_detail(model, tol).value;
}

double bt_gram(const HurstModel& model, const IncrementGram& gram) {
  const UniformGrid& grid = gram.grid;
  if (grid.horizon != model.horizon)
    throw std::invalid_argument("bt_gram: grid and model horizons differ");
  const int n = grid.n;
  const double dt = grid.step();
  // column q holds the cell-sampled kernel exp(-theta(t_q - .)) 1_[0, t_q];
  // cells at and beyond t_q are zero, so the kernel is exactly a step function
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  const double rho = std::exp(-model.theta * dt);
  for (int q = 1; q <= n; ++q) {
    double val = std::exp(-model.theta * (grid.node(q) - grid.midpoint(q - 1)));
    for (int j = q - 1; j >= 0; --j) {
      u(j, q - 1) = val;
      val *= rho;
    }
  }
  const Eigen::MatrixXd gu = gram.entries * u;
  // trapezoid over nodes t_1..t_n of phi(t) = <k_t, k_t>; phi(0) = 0
  double acc = 0.0;
  for (int q = 1; q <= n; ++q) {
    const double phi = u.col(q - 1).dot(gu.col(q - 1));
    acc += (q == n ? 0.5 : 1.0) * phi;
  }
  return acc * dt / model.horizon;
}

double bt_gram(const HurstModel& model, const UniformGrid& grid) {
  return bt_gram(model, increment_gram(model, grid));
}

}  // namespace fouest
