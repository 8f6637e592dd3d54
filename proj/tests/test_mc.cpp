#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "fouest/constants.hpp"
#include "fouest/hilbert.hpp"
#include "fouest/kernels.hpp"
#include "fouest/limits.hpp"
#include "fouest/mc.hpp"
#include "fouest/rng.hpp"
#include "fouest/sampler.hpp"

using namespace fouest;

TEST_SUITE_BEGIN("mc");

TEST_CASE("i2_discrete") {
  const HurstModel m(0.25, 1.0, 2.0);
  const UniformGrid grid(32, 2.0);
  const IncrementGram G = increment_gram(m, grid);
  SUBCASE("zero kernel gives zero") {
    const StepKernel2D zero{grid, Eigen::MatrixXd::Zero(32, 32), true};
    const Eigen::VectorXd dB = Eigen::VectorXd::Random(32);
    CHECK(i2_discrete(zero, dB, G) == 0.0);
  }
  SUBCASE("asymmetric kernels are rejected") {
    Eigen::MatrixXd v = Eigen::MatrixXd::Random(32, 32);
    const StepKernel2D k{grid, v, false};
    CHECK_THROWS_AS(i2_discrete(k, Eigen::VectorXd::Zero(32), G), std::invalid_argument);
  }
  SUBCASE("linear in the kernel") {
    Eigen::MatrixXd r1 = Eigen::MatrixXd::Random(32, 32);
    Eigen::MatrixXd r2 = Eigen::MatrixXd::Random(32, 32);
    const StepKernel2D k1{grid, ((r1 + r1.transpose()) / 2).eval(), true};
    const StepKernel2D k2{grid, ((r2 + r2.transpose()) / 2).eval(), true};
    const StepKernel2D combo{grid, (2.5 * k1.values - 0.75 * k2.values).eval(), true};
    const Eigen::VectorXd dB = Eigen::VectorXd::Random(32);
    CHECK(i2_discrete(combo, dB, G) ==
          doctest::Approx(2.5 * i2_discrete(k1, dB, G) - 0.75 * i2_discrete(k2, dB, G))
              .epsilon(1e-11));
  }
  SUBCASE("sample mean near zero and variance matching the isometry") {
    const KernelFamily fam = kernel_family(m);
    const StepKernel2D f = fam.sample_f(grid);
    const double target = 2.0 * inner_h2(f, f, G);
    const SamplerConfig cfg{SamplerMethod::circulant, 13, 32, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, 10000).increments;
    double s = 0, s2 = 0, s4 = 0;
    for (int r = 0; r < rows.rows(); ++r) {
      const double v = i2_discrete(f, rows.row(r), G);
      s += v;
      s2 += v * v;
      s4 += v * v * v * v;
    }
    const int mm = static_cast<int>(rows.rows());
    const double mean = s / mm;
    const double var = s2 / mm - mean * mean;
    const double mu4 = s4 / mm;
    const double se_mean = std::sqrt(var / mm);
    const double se_var = std::sqrt(std::max(mu4 - var * var, 0.0) / mm);
    CHECK(std::abs(mean) < 5.0 * se_mean);
    CHECK(std::abs(var - target) < 5.0 * se_var);
  }
}

TEST_CASE("ratio_statistic") {
  const HurstModel m(0.25, 1.0, 5.0);
  const UniformGrid grid(100, 5.0);
  SUBCASE("zero increments expose the centering terms") {
    // I2 is the centered quadratic form, so a zero draw sits at minus the
    // trace against the Gram matrix, not at zero; the discrete denominator
    // centering (trace of g) approaches b_T as the grid refines
    const RatioContext ctx = make_ratio_context(m, grid);
    const RatioParts p = ratio_parts(ctx, Eigen::VectorXd::Zero(100));
    CHECK(p.i2_f == doctest::Approx(-ctx.trace_f).epsilon(1e-12));
    const double trace_g = ctx.alpha * ctx.trace_f - ctx.beta * ctx.trace_h;
    CHECK(p.denominator == doctest::Approx(ctx.bt - trace_g).epsilon(1e-10));
    CHECK(trace_g == doctest::Approx(ctx.bt).epsilon(0.05));
  }
  SUBCASE("fast path equals the generic second-chaos evaluation") {
    const IncrementGram G = increment_gram(m, grid);
    const KernelFamily fam = kernel_family(m);
    const StepKernel2D f = fam.sample_f(grid);
    const StepKernel2D g = fam.sample_g(grid);
    const RatioContext ctx = make_ratio_context(m, grid);
    const SamplerConfig cfg{SamplerMethod::circulant, 3, 100, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, 20).increments;
    for (int r = 0; r < rows.rows(); ++r) {
      const Eigen::VectorXd dB = rows.row(r);
      const RatioParts p = ratio_parts(ctx, dB);
      CHECK(p.i2_f == doctest::Approx(i2_discrete(f, dB, G)).epsilon(1e-11));
      CHECK(p.i2_g == doctest::Approx(i2_discrete(g, dB, G)).epsilon(1e-10));
      CHECK(p.denominator ==
            doctest::Approx(i2_discrete(g, dB, G) + ctx.bt).epsilon(1e-10));
    }
  }
  SUBCASE("variance approaches 1 at T = 40") {
    const HurstModel m40(0.25, 1.0, 40.0);
    const UniformGrid g40(2000, 40.0);
    const RatioContext ctx = make_ratio_context(m40, g40);
    const SamplerConfig cfg{SamplerMethod::circulant, 77, 2000, m40};
    const Eigen::MatrixXd rows = sample_circulant(cfg, 5000).increments;
    double s = 0, s2 = 0;
    int used = 0;
    for (int r = 0; r < rows.rows(); ++r) {
      const auto v = ratio_statistic(ctx, rows.row(r));
      if (!v) continue;
      s += *v;
      s2 += *v * *v;
      ++used;
    }
    const double mean = s / used, var = s2 / used - mean * mean;
    CHECK(used == 5000);
    CHECK(var == doctest::Approx(1.0).epsilon(0.10));
    // finite-horizon bias of the ratio shrinks with T but is genuinely
    // nonzero; at T = 40 it sits near -0.13
    CHECK(std::abs(mean) < 0.2);
  }
}

TEST_CASE("ratio statistic bias decays along the horizon") {
  // the numerator and denominator chaoses are correlated, so the mean of the
  // statistic is negative at finite T and drifts to zero as T grows
  double prev = 1e9;
  for (double T : {5.0, 10.0, 20.0}) {
    const HurstModel m(0.25, 1.0, T);
    const int n = static_cast<int>(50 * T);
    const RatioContext ctx = make_ratio_context(m, UniformGrid(n, T));
    const SamplerConfig cfg{SamplerMethod::circulant, 4242, n, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, 3000).increments;
    double s = 0;
    for (int r = 0; r < rows.rows(); ++r)
      s += ratio_statistic(ctx, rows.row(r)).value_or(0.0);
    const double mean = s / rows.rows();
    CHECK(mean < 0.0);
    CHECK(std::abs(mean) < prev);
    prev = std::abs(mean);
  }
}

TEST_CASE("fou_path") {
  SUBCASE("zero increments give the zero path") {
    const HurstModel m(0.25, 1.0, 1.0);
    const Eigen::VectorXd path = fou_path(Eigen::VectorXd::Zero(16), m);
    CHECK(path.cwiseAbs().maxCoeff() == 0.0);
    CHECK(path.size() == 17);
  }
  SUBCASE("a vanishing drift reduces to the cumulative sum") {
    const HurstModel m(0.25, 1e-12, 1.0);
    Eigen::VectorXd dB(4);
    dB << 0.5, -0.25, 1.0, 0.125;
    const Eigen::VectorXd path = fou_path(dB, m);
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      acc += dB[i];
      CHECK(path[i + 1] == doctest::Approx(acc).epsilon(1e-9));
    }
  }
  SUBCASE("Brownian stationary variance is 1/(2 theta)") {
    const HurstModel m(0.5, 1.0, 20.0);
    const int n = 1000, mm = 3000;
    const SamplerConfig cfg{SamplerMethod::circulant, 8, n, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, mm).increments;
    double s2 = 0.0;
    for (int r = 0; r < mm; ++r) {
      const Eigen::VectorXd path = fou_path(rows.row(r), m);
      s2 += path[n] * path[n];
    }
    const double var = s2 / mm;
    const double target = 0.5;
    CHECK(std::abs(var - target) < 5.0 * target * std::sqrt(2.0 / mm));
  }
}

TEST_CASE("lse_discrete") {
  SUBCASE("flat path after one jump estimates zero") {
    Eigen::VectorXd path(6);
    path << 0.0, 1.5, 1.5, 1.5, 1.5, 1.5;
    CHECK(lse_discrete(path, 0.5) == doctest::Approx(0.0));
  }
  SUBCASE("pure decay path against the deterministic evaluation") {
    const double theta = 0.7, dt = 0.01;
    const int n = 4000;
    Eigen::VectorXd path(n + 1);
    for (int i = 0; i <= n; ++i) path[i] = 2.0 * std::exp(-theta * dt * i);
    // independent loop oracle
    double num = 0, den = 0;
    for (int i = 1; i <= n; ++i) {
      num += path[i - 1] * (path[i] - path[i - 1]);
      den += path[i] * path[i];
    }
    const double oracle = -num / (dt * den);
    CHECK(lse_discrete(path, dt) == doctest::Approx(oracle).epsilon(1e-13));
    // the sums align with (1 - e^(-theta dt))/dt up to the e^(2 theta dt)
    // index offset between numerator and denominator
    const double aligned = (1.0 - std::exp(-theta * dt)) / dt;
    CHECK(lse_discrete(path, dt) ==
          doctest::Approx(aligned * std::exp(2.0 * theta * dt)).epsilon(1e-6));
    CHECK(std::abs(lse_discrete(path, dt) - aligned) < 3.0 * theta * theta * dt);
  }
  SUBCASE("zero path is rejected") {
    CHECK_THROWS_AS(lse_discrete(Eigen::VectorXd::Zero(5), 0.1), std::invalid_argument);
  }
  SUBCASE("consistent in the Brownian regime") {
    // H = 1/2, T = 40: the classical LSE bias ~2/T leaves the mean within
    // 10% of theta
    const HurstModel m(0.5, 1.0, 40.0);
    const int n = 2000, mm = 2000;
    const SamplerConfig cfg{SamplerMethod::circulant, 9, n, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, mm).increments;
    double s = 0.0;
    for (int r = 0; r < mm; ++r)
      s += lse_discrete(fou_path(rows.row(r), m), m.horizon / n);
    CHECK(s / mm == doctest::Approx(1.0).epsilon(0.10));
  }
  SUBCASE("rough regime carries the quadratic-variation bias") {
    // for H < 1/2 the increments' quadratic variation dominates the
    // numerator: E theta_hat ~ dt^(2H-1)/(2 a) + theta-order terms, far from
    // theta itself; the prediction is the oracle here
    const HurstModel m(0.25, 1.0, 20.0);
    const int n = 2000, mm = 1000;
    const double dt = m.horizon / n;
    const SamplerConfig cfg{SamplerMethod::circulant, 10, n, m};
    const Eigen::MatrixXd rows = sample_circulant(cfg, mm).increments;
    double s = 0.0;
    for (int r = 0; r < mm; ++r)
      s += lse_discrete(fou_path(rows.row(r), m), dt);
    const double mean = s / mm;
    const double qv_prediction = 0.5 * std::pow(dt, 2 * m.hurst - 1.0) / a_limit(m.hurst, m.theta);
    CHECK(mean == doctest::Approx(qv_prediction).epsilon(0.10));
    CHECK(mean > 5.0);  // nowhere near theta = 1
  }
}

TEST_CASE("kolmogorov_distance") {
  SUBCASE("stair-step construction reaches 1/(2m)") {
    const int mm = 200;
    std::vector<double> sample(mm);
    for (int i = 0; i < mm; ++i) sample[i] = normal_quantile((i + 0.5) / mm);
    CHECK(kolmogorov_distance(sample, normal_cdf) ==
          doctest::Approx(1.0 / (2.0 * mm)).epsilon(1e-10));
  }
  SUBCASE("singleton at the median scores 1/2") {
    CHECK(kolmogorov_distance({0.0}, normal_cdf) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("permutation invariant") {
    std::vector<double> sample{0.3, -1.2, 0.7, 2.4, -0.5};
    const double d = kolmogorov_distance(sample, normal_cdf);
    std::reverse(sample.begin(), sample.end());
    CHECK(kolmogorov_distance(sample, normal_cdf) == d);
  }
  SUBCASE("rejects empty and non-finite input") {
    CHECK_THROWS_AS(kolmogorov_distance({}, normal_cdf), std::invalid_argument);
    CHECK_THROWS_AS(kolmogorov_distance({0.1, std::nan("")}, normal_cdf),
                    std::invalid_argument);
  }
}

TEST_CASE("DKW self-test on synthetic normal samples") {
  // P(D > radius) <= alpha = 1%; over 300 independent runs the failure count
  // stays within a 3-sigma binomial band of its expectation
  const int runs = 300, mm = 500;
  int failures = 0;
  const double radius = dkw_radius(mm, 0.01);
  for (int run = 0; run < runs; ++run) {
    const CounterRng rng(2024, run);
    std::vector<double> sample(mm);
    for (int i = 0; i < mm; ++i) sample[i] = rng.gaussian(i);
    if (kolmogorov_distance(sample, normal_cdf) > radius) ++failures;
  }
  CHECK(failures <= 8);
}

TEST_CASE("mc_run") {
  ReplicationPlan plan;
  plan.hurst = 0.25;
  plan.theta = 1.0;
  plan.t_ladder = {2.0, 4.0, 8.0};
  plan.m = 400;
  plan.cells_per_time = 25.0;
  plan.seed = 515;
  plan.bias_probe_m = 32;
  SUBCASE("deterministic under fixed seed and any worker count") {
    setenv("FOUEST_WORKERS", "1", 1);
    const BerryEsseenReport a = mc_run(plan);
    setenv("FOUEST_WORKERS", "4", 1);
    const BerryEsseenReport b = mc_run(plan);
    unsetenv("FOUEST_WORKERS");
    REQUIRE(a.per_t.size() == b.per_t.size());
    for (std::size_t i = 0; i < a.per_t.size(); ++i) {
      CHECK(a.per_t[i].distance == b.per_t[i].distance);
      CHECK(a.per_t[i].stat_mean == b.per_t[i].stat_mean);
      CHECK(a.per_t[i].bias_probe_mean_absdiff == b.per_t[i].bias_probe_mean_absdiff);
    }
    CHECK(a.fitted_exponent == b.fitted_exponent);
  }
  SUBCASE("distances live in [0, 1] and exclusions are surfaced") {
    const BerryEsseenReport r = mc_run(plan);
    for (const auto& td : r.per_t) {
      CHECK(td.distance >= 0.0);
      CHECK(td.distance <= 1.0);
      CHECK(td.excluded >= 0);
      CHECK(td.m_effective + td.excluded == plan.m);
    }
    CHECK(r.predicted_beta == doctest::Approx(0.5));
  }
  SUBCASE("discrete-LSE estimator path") {
    plan.estimator = EstimatorKind::discrete_lse;
    const BerryEsseenReport r = mc_run(plan);
    for (const auto& td : r.per_t) {
      CHECK(td.distance >= 0.0);
      CHECK(td.distance <= 1.0);
      CHECK(td.m_effective == plan.m);
    }
  }
}

TEST_CASE("mc_run consumes pre-sampled batches") {
  ReplicationPlan plan;
  plan.hurst = 0.3;
  plan.theta = 1.0;
  plan.t_ladder = {2.0, 4.0, 6.0};
  plan.m = 150;
  plan.cells_per_time = 20.0;
  plan.seed = 99;
  plan.bias_probe_m = 0;
  const BerryEsseenReport inline_run = mc_run(plan);

  const auto dir = std::filesystem::temp_directory_path() / "fouest_batches";
  std::filesystem::create_directories(dir);
  for (double T : plan.t_ladder) {
    const HurstModel m(plan.hurst, plan.theta, T);
    const int n = static_cast<int>(plan.cells_per_time * T);
    const SamplerConfig cfg{SamplerMethod::circulant, plan.seed, n, m};
    char name[64];
    std::snprintf(name, sizeof(name), "paths_T%g.bin", T);
    write_batch(sample_circulant(cfg, plan.m), dir / name);
  }
  plan.batch_dir = dir.string();
  const BerryEsseenReport from_files = mc_run(plan);
  REQUIRE(from_files.per_t.size() == inline_run.per_t.size());
  for (std::size_t i = 0; i < from_files.per_t.size(); ++i)
    CHECK(from_files.per_t[i].distance == inline_run.per_t[i].distance);
  std::filesystem::remove_all(dir);

  plan.batch_dir = (dir / "missing").string();
  CHECK_THROWS(mc_run(plan));
}

TEST_CASE("second-chaos isometry at H = 0.4") {
  const HurstModel m(0.4, 1.0, 10.0);
  const int n = 300, mm = 4000;
  const UniformGrid grid(n, 10.0);
  const IncrementGram G = increment_gram(m, grid);
  const KernelNormsAtGrid pack = kernel_norms_at(m, G);
  const RatioContext ctx = make_ratio_context(m, grid);
  const SamplerConfig cfg{SamplerMethod::circulant, 606, n, m};
  const Eigen::MatrixXd rows = sample_circulant(cfg, mm).increments;
  double s2f = 0, s4f = 0, s2g = 0, s4g = 0;
  for (int r = 0; r < mm; ++r) {
    const RatioParts p = ratio_parts(ctx, rows.row(r));
    s2f += p.i2_f * p.i2_f;
    s4f += std::pow(p.i2_f, 4);
    s2g += p.i2_g * p.i2_g;
    s4g += std::pow(p.i2_g, 4);
  }
  const double var_f = s2f / mm, var_g = s2g / mm;
  const double se_f = std::sqrt(std::max(s4f / mm - var_f * var_f, 0.0) / mm);
  const double se_g = std::sqrt(std::max(s4g / mm - var_g * var_g, 0.0) / mm);
  CHECK(std::abs(var_f - 2.0 * pack.norm_f2) < 5.0 * se_f);
  CHECK(std::abs(var_g - 2.0 * pack.norm_g2) < 5.0 * se_g);
}

TEST_CASE("collect_statistics") {
  const HurstModel m(0.25, 1.0, 5.0);
  const StatSample chaos = collect_statistics(m, 250, 500, 3, EstimatorKind::chaos_ratio);
  CHECK(chaos.values.size() == 500);
  CHECK(chaos.horizon == 5.0);
  for (const double v : chaos.values) CHECK(std::isfinite(v));
  const StatSample again = collect_statistics(m, 250, 500, 3, EstimatorKind::chaos_ratio);
  CHECK(chaos.values == again.values);
  const StatSample lse = collect_statistics(m, 250, 100, 3, EstimatorKind::discrete_lse);
  CHECK(lse.kind == EstimatorKind::discrete_lse);
  CHECK(lse.values.size() == 100);
}

TEST_CASE("chaos and LSE statistics co-move on shared noise") {
  // at H < 1/2 the discrete LSE fluctuation is dominated by the increment
  // quadratic variation, which enters the chaos numerator with the opposite
  // net sign; the association is strong but negative
  const HurstModel m(0.3, 1.0, 20.0);
  const PairedStats ps = paired_statistics(m, 400, 800, 42);
  CHECK(std::abs(ps.correlation) > 0.5);
  CHECK(ps.correlation < 0.0);
}

TEST_CASE("energy test separates different laws") {
  // H = 0.3 versus H = 0.45 increments at matched grids should reject
  const HurstModel m1(0.3, 1.0, 1.0), m2(0.45, 1.0, 1.0);
  const SamplerConfig c1{SamplerMethod::circulant, 7, 64, m1};
  const SamplerConfig c2{SamplerMethod::circulant, 8, 64, m2};
  const Eigen::MatrixXd x = sample_circulant(c1, 400).increments;
  const Eigen::MatrixXd y = sample_circulant(c2, 400).increments;
  const EnergyTestResult r = energy_two_sample_test(x, y, 199, 77);
  CHECK(r.p_value <= 0.01);
}

TEST_SUITE_END();
