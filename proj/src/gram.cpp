#include "fouest/gram.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fouest/parallel.hpp"

namespace fouest {

IncrementGram increment_gram(const HurstModel& model, const UniformGrid& grid) {
  if (grid.horizon != model.horizon)
    throw std::invalid_argument("increment_gram: grid and model horizons differ");
  const int n = grid.n;

  // On a uniform grid every R(t_i, t_j) is a combination of the diagonal
  // values D[k] = cov(t_k, t_k) = t_k^(2H), so one table of n+2 cov calls
  // covers all four second-difference terms:
  //   R(t_i, t_j) = (D[i] + D[j] - D[|i-j|]) / 2.
  std::vector<long double> diag(n + 2);
  for (int k = 0; k <= n + 1; ++k) {
    const long double tk = static_cast<long double>(grid.horizon) * k / n;
    diag[k] = fbm_cov<long double>(model.hurst, tk, tk);
  }
  const auto node_cov = [&](int i, int j) -> long double {
    return (diag[i] + diag[j] - diag[std::abs(i - j)]) / 2.0L;
  };

  Eigen::MatrixXd g(n, n);
  parallel_for(n, [&](std::int64_t i) {
    for (int j = 0; j < n; ++j) {
      const long double e = node_cov(i + 1, j + 1) - node_cov(i + 1, j) -
                            node_cov(i, j + 1) + node_cov(i, j);
      g(i, j) = static_cast<double>(e);
    }
  });
  g = ((g + g.transpose()) / 2.0).eval();
  return IncrementGram{grid, model.hurst, std::move(g)};
}

}  // namespace fouest
