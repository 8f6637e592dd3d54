#include "fouest/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

#include "fouest/errors.hpp"

namespace fouest {

double GaussRule::apply(const ScalarFn& f, double lo, double hi) const {
  const double len = hi - lo;
  double acc = 0.0;
  for (int i = 0; i < nodes.size(); ++i) acc += weights[i] * f(lo + len * nodes[i]);
  return acc * len;
}

namespace {

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1, 1], mapped to
// x^beta on [0, 1] with a = 0, b = beta.
GaussRule jacobi_rule(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss rule: need n >= 1");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  const double ab = a + b;
  for (int k = 0; k < n; ++k) {
    double diag;
    if (k == 0) {
      diag = (b - a) / (ab + 2.0);
    } else {
      const double den = (2.0 * k + ab) * (2.0 * k + ab + 2.0);
      diag = (b * b - a * a) / den;
    }
    J(k, k) = diag;
    if (k >= 1) {
      double beta_k;
      if (k == 1) {
        beta_k = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
      } else {
        const double two_k_ab = 2.0 * k + ab;
        beta_k = 4.0 * k * (k + a) * (k + b) * (k + ab) /
                 (two_k_ab * two_k_ab * (two_k_ab + 1.0) * (two_k_ab - 1.0));
      }
      const double off = std::sqrt(beta_k);
      J(k, k - 1) = off;
      J(k - 1, k) = off;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success)
    throw numeric_error("gauss rule: eigen decomposition failed");
  const double mu0 = std::pow(2.0, ab + 1.0) *
                     std::exp(std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::pow(0.5, b + 1.0);  // map [-1,1] -> [0,1], a = 0
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (1.0 + es.eigenvalues()[i]);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0 * scale;
  }
  return rule;
}

// Golub-Welsch is an O(n^3) eigensolve; rules are cached per (n, beta).
const GaussRule& cached_rule(int n, double b) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, GaussRule> cache;
  std::scoped_lock lock(mu);
  auto [it, inserted] = cache.try_emplace({n, b});
  if (inserted) it->second = jacobi_rule(n, 0.0, b);
  return it->second;
}

}  // namespace

GaussRule gauss_legendre(int n) { return cached_rule(n, 0.0); }

GaussRule gauss_jacobi01(int n, double beta) {
  if (!(beta > -1.0)) throw std::invalid_argument("gauss_jacobi01: beta must be > -1");
  return cached_rule(n, beta);
}

double apply_power_weighted(const GaussRule& jacobi, const ScalarFn& f, double lo,
                            double hi, double beta) {
  const double len = hi - lo;
  if (len <= 0.0) return 0.0;
  double acc = 0.0;
  for (int i = 0; i < jacobi.nodes.size(); ++i)
    acc += jacobi.weights[i] * f(lo + len * jacobi.nodes[i]);
  return acc * std::pow(len, beta + 1.0);
}

std::vector<std::pair<double, double>> graded_panels(double lo, double hi, int levels,
                                                     double ratio) {
  const double mid = 0.5 * (lo + hi);
  std::vector<double> pts;
  pts.push_back(lo);
  for (int l = levels; l >= 1; --l) pts.push_back(lo + (mid - lo) / std::pow(ratio, l));
  pts.push_back(mid);
  for (int l = 1; l <= levels; ++l) pts.push_back(hi - (hi - mid) / std::pow(ratio, l));
  pts.push_back(hi);
  std::vector<std::pair<double, double>> panels;
  panels.reserve(pts.size() - 1);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) panels.emplace_back(pts[i], pts[i + 1]);
  return panels;
}

double integrate_panels(const ScalarFn& f,
                        const std::vector<std::pair<double, double>>& panels,
                        const GaussRule& rule) {
  double acc = 0.0;
  for (const auto& [a, b] : panels) acc += rule.apply(f, a, b);
  return acc;
}

QuadResult integrate_power_weighted_adaptive(const ScalarFn& f, double lo, double hi,
                                             double beta, double tol, int max_nodes) {
  int n = 24;
  GaussRule rule = gauss_jacobi01(n, beta);
  double prev = apply_power_weighted(rule, f, lo, hi, beta);
  for (;;) {
    n *= 2;
    if (n > max_nodes)
      throw numeric_error("integrate_power_weighted_adaptive: tolerance " +
                          std::to_string(tol) + " not reached within node budget on [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    rule = gauss_jacobi01(n, beta);
    const double cur = apply_power_weighted(rule, f, lo, hi, beta);
    if (!std::isfinite(cur))
      throw numeric_error("integrate_power_weighted_adaptive: non-finite value on [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    const double change = std::abs(cur - prev);
    if (change <= tol) return {cur, change};
    prev = cur;
  }
}

}  // namespace fouest
