#include "fouest/mc.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

#include "fouest/constants.hpp"
#include "fouest/errors.hpp"
#include "fouest/kernels.hpp"
#include "fouest/limits.hpp"
#include "fouest/parallel.hpp"
#include "fouest/rng.hpp"
#include "fouest/sampler.hpp"

namespace fouest {

double i2_discrete(const StepKernel2D& K, const Eigen::VectorXd& dB,
                   const IncrementGram& G) {
  if (K.values.rows() != G.n() || dB.size() != G.n())
    throw std::invalid_argument("i2_discrete: dimension mismatch");
  if (!K.symmetric)
    throw std::invalid_argument("i2_discrete: kernel must be symmetric");
  return dB.dot(K.values * dB) - K.values.cwiseProduct(G.entries).sum();
}

RatioContext make_ratio_context(const HurstModel& model, const UniformGrid& grid) {
  if (grid.horizon != model.horizon)
    throw std::invalid_argument("make_ratio_context: grid and model horizons differ");
  const KernelFamily fam = kernel_family(model);
  const int n = grid.n;
  const double dt = grid.step();
  RatioContext ctx{model,
                   grid,
                   fam.f_scale(),
                   fam.alpha(),
                   fam.beta(),
                   std::exp(-model.theta * dt),
                   fam.sample_h_factor(grid).values,
                   0.0,
                   0.0,
                   bt_quadrature(model, 1e-10)};

  // centering traces over the Toeplitz Gram: sum_ij K(i,j) G(i,j)
  Eigen::VectorXd gamma(n);
  for (int k = 0; k < n; ++k) gamma[k] = autocov_stationary(model, grid, k);
  double tf = n * gamma[0];
  double ek = 1.0;
  for (int k = 1; k < n; ++k) {
    ek *= ctx.rho;
    tf += 2.0 * (n - k) * ek * gamma[k];
  }
  ctx.trace_f = ctx.f_scale * tf;
  const Eigen::VectorXd& v = ctx.h_factor;
  double th = gamma[0] * v.squaredNorm();
  for (int k = 1; k < n; ++k) {
    double corr = 0.0;
    for (int i = 0; i + k < n; ++i) corr += v[i] * v[i + k];
    th += 2.0 * gamma[k] * corr;
  }
  ctx.trace_h = th;
  return ctx;
}

RatioParts ratio_parts(const RatioContext& ctx, const Eigen::VectorXd& dB) {
  const int n = ctx.grid.n;
  if (dB.size() != n) throw std::invalid_argument("ratio_parts: dimension mismatch");
  // dB' f dB through the prefix recursion p_i = rho (p_{i-1} + x_{i-1})
  double quad_f = 0.0;
  double prefix = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = dB[i];
    quad_f += x * x + 2.0 * x * prefix;
    prefix = ctx.rho * (prefix + x);
  }
  quad_f *= ctx.f_scale;
  const double hv = ctx.h_factor.dot(dB);
  const double i2_f = quad_f - ctx.trace_f;
  const double i2_h = hv * hv - ctx.trace_h;
  const double i2_g = ctx.alpha * i2_f - ctx.beta * i2_h;
  const double denom = i2_g + ctx.bt;
  return {i2_f, i2_g, denom, std::abs(denom) < 1e-12};
}

std::optional<double> ratio_statistic(const RatioContext& ctx, const Eigen::VectorXd& dB) {
  const RatioParts p = ratio_parts(ctx, dB);
  if (p.excluded) return std::nullopt;
  return p.i2_f / p.denominator;
}

std::optional<double> ratio_statistic(const Eigen::VectorXd& dB, const HurstModel& model,
                                      const UniformGrid& grid) {
  return ratio_statistic(make_ratio_context(model, grid), dB);
}

Eigen::VectorXd fou_path(const Eigen::VectorXd& dB, const HurstModel& model) {
  const int n = static_cast<int>(dB.size());
  const double dt = model.horizon / n;
  const double decay = std::exp(-model.theta * dt);
  const double half = std::exp(-model.theta * dt / 2.0);
  Eigen::VectorXd x(n + 1);
  x[0] = 0.0;
  for (int i = 0; i < n; ++i) x[i + 1] = decay * x[i] + half * dB[i];
  return x;
}

double lse_discrete(const Eigen::VectorXd& path, double step) {
  const int n = static_cast<int>(path.size()) - 1;
  if (n < 1) throw std::invalid_argument("lse_discrete: path needs at least 2 points");
  double num = 0.0, den = 0.0;
  for (int i = 1; i <= n; ++i) {
    num += path[i - 1] * (path[i] - path[i - 1]);
    den += path[i] * path[i];
  }
  if (den == 0.0) throw std::invalid_argument("lse_discrete: zero denominator");
  return -num / (step * den);
}

double kolmogorov_distance(std::vector<double> sample,
                           const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("kolmogorov_distance: empty sample");
  for (const double x : sample)
    if (!std::isfinite(x))
      throw std::invalid_argument("kolmogorov_distance: non-finite sample value");
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max((i + 1) / m - f, f - i / m));
  }
  return d;
}

double dkw_radius(int m, double alpha) {
  if (m < 1 || !(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("dkw_radius: need m >= 1 and alpha in (0,1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * m));
}

namespace {

Eigen::VectorXd aggregate_pairs(const Eigen::VectorXd& fine) {
  Eigen::VectorXd coarse(fine.size() / 2);
  for (int i = 0; i < coarse.size(); ++i) coarse[i] = fine[2 * i] + fine[2 * i + 1];
  return coarse;
}

struct ReplicateOut {
  double stat = 0.0;
  bool excluded = false;
  bool negative = false;
};

}  // namespace

BerryEsseenReport mc_run(const ReplicationPlan& plan) {
  if (plan.t_ladder.size() < 3)
    throw std::invalid_argument("mc_run: ladder needs at least 3 horizons");
  if (plan.m < 100) throw std::invalid_argument("mc_run: m must be >= 100");
  BerryEsseenReport report;
  report.predicted_beta = beta_rate(plan.hurst);
  report.mc_floor = 0.8687 / std::sqrt(static_cast<double>(plan.m));

  for (const double T : plan.t_ladder) {
    const HurstModel model(plan.hurst, plan.theta, T);
    const int n = std::max(16, static_cast<int>(std::lround(plan.cells_per_time * T)));
    const UniformGrid grid(n, T);
    const RatioContext ctx = make_ratio_context(model, grid);

    Eigen::MatrixXd increments;
    if (!plan.batch_dir.empty()) {
      char name[64];
      std::snprintf(name, sizeof(name), "paths_T%g.bin", T);
      const PathBatch batch = read_batch(std::filesystem::path(plan.batch_dir) / name);
      if (batch.grid.n != n || batch.provenance.model.hurst != plan.hurst ||
          batch.provenance.model.theta != plan.theta || batch.m() < plan.m)
        throw std::runtime_error(std::string("mc_run: batch file ") + name +
                                 " does not match the plan");
      increments = batch.increments.topRows(plan.m);
    } else {
      const SamplerConfig cfg{SamplerMethod::circulant, plan.seed, n, model};
      increments = sample_circulant(cfg, plan.m).increments;
    }

    std::vector<ReplicateOut> outs(plan.m);
    const bool use_lse = plan.estimator == EstimatorKind::discrete_lse;
    const double norm_scale = std::sqrt(T / (plan.theta * sigma2(plan.hurst)));
    parallel_for(plan.m, [&](std::int64_t r) {
      const Eigen::VectorXd dB = increments.row(r);
      if (use_lse) {
        const Eigen::VectorXd path = fou_path(dB, model);
        outs[r].stat = norm_scale * (lse_discrete(path, grid.step()) - plan.theta);
      } else {
        const RatioParts p = ratio_parts(ctx, dB);
        outs[r].stat = p.excluded ? 0.0 : p.i2_f / p.denominator;
        outs[r].excluded = p.excluded;
        outs[r].negative = p.denominator < 0.0;
      }
    });

    TDistance td;
    td.horizon = T;
    td.grid_n = n;
    td.bt = ctx.bt;
    td.excluded = 0;
    td.negative_denominators = 0;
    std::vector<double> values;
    values.reserve(plan.m);
    for (const auto& o : outs) {
      if (o.excluded) {
        ++td.excluded;
        continue;
      }
      if (o.negative) ++td.negative_denominators;
      values.push_back(o.stat);
    }
    td.m_effective = static_cast<int>(values.size());
    if (td.m_effective == 0) throw numeric_error("mc_run: all replicates excluded");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / td.m_effective;
    double var = 0.0;
    for (const double v : values) var += (v - mean) * (v - mean);
    td.stat_mean = mean;
    td.stat_variance = var / std::max(1, td.m_effective - 1);
    td.distance = kolmogorov_distance(values, normal_cdf);
    td.dkw = dkw_radius(td.m_effective, plan.alpha);

    // discretization probe: the same underlying path at resolutions 2n and n
    // (pairwise-summed increments), chaos statistic compared pathwise
    td.bias_probe_mean_absdiff = 0.0;
    if (plan.bias_probe_m > 0 && !use_lse) {
      const int probe_m = std::min(plan.bias_probe_m, plan.m);
      const UniformGrid fine_grid(2 * n, T);
      const RatioContext fine_ctx = make_ratio_context(model, fine_grid);
      const SamplerConfig fine_cfg{SamplerMethod::circulant, plan.seed ^ 0x9e3779b97f4a7c15ull,
                                   2 * n, model};
      const Eigen::MatrixXd fine_rows = sample_circulant(fine_cfg, probe_m).increments;
      std::vector<double> diffs(probe_m);
      parallel_for(probe_m, [&](std::int64_t r) {
        const Eigen::VectorXd fine = fine_rows.row(r);
        const RatioParts pf = ratio_parts(fine_ctx, fine);
        const RatioParts pc = ratio_parts(ctx, aggregate_pairs(fine));
        diffs[r] = (pf.excluded || pc.excluded)
                       ? 0.0
                       : std::abs(pf.i2_f / pf.denominator - pc.i2_f / pc.denominator);
      });
      td.bias_probe_mean_absdiff =
          std::accumulate(diffs.begin(), diffs.end(), 0.0) / probe_m;
    }
    report.per_t.push_back(td);
  }

  std::vector<std::pair<double, double>> series;
  for (const auto& td : report.per_t) series.emplace_back(td.horizon, td.distance);
  report.fitted_exponent = rate_fit(series, 0.0);
  const TDistance& first = report.per_t.front();
  const TDistance& last = report.per_t.back();
  report.decay_pass = (first.distance - last.distance) > (first.dkw + last.dkw);
  report.note =
      "the bound's constant is unspecified and the Monte Carlo floor ~0.87/sqrt(m) "
      "limits the resolvable exponent; the fit is reported, not asserted";
  return report;
}

StatSample collect_statistics(const HurstModel& model, int n, int m, std::uint64_t seed,
                              EstimatorKind kind) {
  const UniformGrid grid(n, model.horizon);
  const SamplerConfig cfg{SamplerMethod::circulant, seed, n, model};
  const Eigen::MatrixXd rows = sample_circulant(cfg, m).increments;
  std::vector<ReplicateOut> outs(m);
  if (kind == EstimatorKind::discrete_lse) {
    const double norm_scale =
        std::sqrt(model.horizon / (model.theta * sigma2(model.hurst)));
    parallel_for(m, [&](std::int64_t r) {
      const Eigen::VectorXd path = fou_path(rows.row(r), model);
      outs[r].stat = norm_scale * (lse_discrete(path, grid.step()) - model.theta);
    });
  } else {
    const RatioContext ctx = make_ratio_context(model, grid);
    parallel_for(m, [&](std::int64_t r) {
      const RatioParts p = ratio_parts(ctx, rows.row(r));
      outs[r].stat = p.excluded ? 0.0 : p.i2_f / p.denominator;
      outs[r].excluded = p.excluded;
    });
  }
  StatSample out{model.horizon, {}, kind};
  out.values.reserve(m);
  for (const auto& o : outs)
    if (!o.excluded) out.values.push_back(o.stat);
  for (const double v : out.values)
    if (!std::isfinite(v)) throw numeric_error("collect_statistics: non-finite value");
  return out;
}

PairedStats paired_statistics(const HurstModel& model, int n, int m, std::uint64_t seed) {
  const UniformGrid grid(n, model.horizon);
  const RatioContext ctx = make_ratio_context(model, grid);
  const SamplerConfig cfg{SamplerMethod::circulant, seed, n, model};
  const Eigen::MatrixXd rows = sample_circulant(cfg, m).increments;
  PairedStats out;
  out.chaos.resize(m);
  out.lse.resize(m);
  const double norm_scale = std::sqrt(model.horizon / (model.theta * sigma2(model.hurst)));
  parallel_for(m, [&](std::int64_t r) {
    const Eigen::VectorXd dB = rows.row(r);
    const RatioParts p = ratio_parts(ctx, dB);
    out.chaos[r] = p.excluded ? 0.0 : p.i2_f / p.denominator;
    const Eigen::VectorXd path = fou_path(dB, model);
    out.lse[r] = norm_scale * (lse_discrete(path, grid.step()) - model.theta);
  });
  double mc = 0, ml = 0;
  for (int r = 0; r < m; ++r) {
    mc += out.chaos[r];
    ml += out.lse[r];
  }
  mc /= m;
  ml /= m;
  double num = 0, vc = 0, vl = 0;
  for (int r = 0; r < m; ++r) {
    num += (out.chaos[r] - mc) * (out.lse[r] - ml);
    vc += (out.chaos[r] - mc) * (out.chaos[r] - mc);
    vl += (out.lse[r] - ml) * (out.lse[r] - ml);
  }
  out.correlation = num / std::sqrt(vc * vl);
  return out;
}

EnergyTestResult energy_two_sample_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                        int permutations, std::uint64_t seed) {
  const int mx = static_cast<int>(x.rows());
  const int my = static_cast<int>(y.rows());
  if (x.cols() != y.cols()) throw std::invalid_argument("energy test: dimension mismatch");
  const int n_total = mx + my;
  Eigen::MatrixXd pooled(n_total, x.cols());
  pooled.topRows(mx) = x;
  pooled.bottomRows(my) = y;

  // pairwise Euclidean distances of the pooled rows
  Eigen::MatrixXd dist(n_total, n_total);
  parallel_for(n_total, [&](std::int64_t i) {
    dist(i, i) = 0.0;
    for (int j = 0; j < static_cast<int>(i); ++j) {
      const double d = (pooled.row(i) - pooled.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  });

  std::vector<int> labels(n_total);
  auto statistic_for = [&](const std::vector<int>& lab) {
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 1; i < n_total; ++i)
      for (int j = 0; j < i; ++j) {
        const double d = dist(i, j);
        if (lab[i] != lab[j])
          sxy += d;
        else if (lab[i] == 0)
          sxx += d;
        else
          syy += d;
      }
    const double e = 2.0 * sxy / (double(mx) * my) - 2.0 * sxx / (double(mx) * mx) -
                     2.0 * syy / (double(my) * my);
    return double(mx) * my / n_total * e;
  };
  for (int i = 0; i < n_total; ++i) labels[i] = i < mx ? 0 : 1;
  const double observed = statistic_for(labels);

  const CounterRng rng(seed, 0x656e657267ull);  // dedicated permutation stream
  std::uint64_t draw = 0;
  int at_least = 0;
  for (int p = 0; p < permutations; ++p) {
    for (int i = n_total - 1; i > 0; --i) {
      const auto j = static_cast<int>(rng.uniform(draw++) * (i + 1));
      std::swap(labels[i], labels[std::min(j, i)]);
    }
    if (statistic_for(labels) >= observed) ++at_least;
  }
  return {observed, (1.0 + at_least) / (permutations + 1.0), permutations};
}

}  // namespace fouest
