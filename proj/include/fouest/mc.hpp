#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fouest/core.hpp"
#include "fouest/gram.hpp"
#include "fouest/step_kernel.hpp"

namespace fouest {

// Discrete second-chaos integral of a symmetric kernel against an increment
// vector: I2(K) = sum_ij K(i,j) (dB_i dB_j - G(i,j)).  Mean zero exactly.
double i2_discrete(const StepKernel2D& K, const Eigen::VectorXd& dB,
                   const IncrementGram& G);

// Per-horizon state shared across replicates: kernel scales, centering
// traces, b_T.  The exponential structure of the kernels makes the quadratic
// forms O(n) per replicate.
struct RatioContext {
  HurstModel model;
  UniformGrid grid;
  double f_scale, alpha, beta;
  double rho;             // exp(-theta step)
  Eigen::VectorXd h_factor;
  double trace_f, trace_h;
  double bt;
};

RatioContext make_ratio_context(const HurstModel& model, const UniformGrid& grid);

struct RatioParts {
  double i2_f;
  double i2_g;
  double denominator;  // i2_g + b_T
  bool excluded;       // |denominator| < 1e-12
};
RatioParts ratio_parts(const RatioContext& ctx, const Eigen::VectorXd& dB);

// Normalized estimator statistic I2(f) / (I2(g) + b_T); nullopt when the
// denominator is within 1e-12 of zero (the replicate is excluded and counted
// by the caller).
std::optional<double> ratio_statistic(const RatioContext& ctx, const Eigen::VectorXd& dB);
std::optional<double> ratio_statistic(const Eigen::VectorXd& dB, const HurstModel& model,
                                      const UniformGrid& grid);

// Path of the Ornstein-Uhlenbeck recursion driven by the increments:
// X_{i+1} = e^(-theta step) X_i + e^(-theta step / 2) dB_i, X_0 = 0.
Eigen::VectorXd fou_path(const Eigen::VectorXd& dB, const HurstModel& model);

// Discrete least squares estimator
// theta_hat = -sum X_{i-1} (X_i - X_{i-1}) / (step * sum_{i>=1} X_i^2).
double lse_discrete(const Eigen::VectorXd& path, double step);

// Exact sup-distance between the empirical CDF of the sample and `cdf`.
double kolmogorov_distance(std::vector<double> sample,
                           const std::function<double(double)>& cdf);

// Dvoretzky-Kiefer-Wolfowitz band half-width sqrt(log(2/alpha) / (2m)).
double dkw_radius(int m, double alpha);

enum class EstimatorKind { chaos_ratio, discrete_lse };

// Realizations of the normalized statistic at one horizon.
struct StatSample {
  double horizon;
  std::vector<double> values;
  EstimatorKind kind;
};

// Draws m replicates and evaluates the chosen statistic on each; excluded
// chaos-ratio replicates are dropped from `values`.
StatSample collect_statistics(const HurstModel& model, int n, int m, std::uint64_t seed,
                              EstimatorKind kind);

struct ReplicationPlan {
  double hurst;
  double theta;
  std::vector<double> t_ladder;
  int m = 5000;
  double cells_per_time = 50.0;
  std::uint64_t seed = 1;
  double alpha = 0.01;
  EstimatorKind estimator = EstimatorKind::chaos_ratio;
  std::string batch_dir;   // optional pre-sampled increment dumps
  int bias_probe_m = 128;  // replicates for the n vs 2n discretization probe
};

struct TDistance {
  double horizon;
  int grid_n;
  int m_effective;
  double distance;
  double dkw;
  int excluded;
  int negative_denominators;
  double stat_mean;
  double stat_variance;
  double bias_probe_mean_absdiff;  // |stat at 2n - stat at n| on coupled paths
  double bt;
};

struct BerryEsseenReport {
  std::vector<TDistance> per_t;
  double fitted_exponent;
  double predicted_beta;  // min(1-2H, 1/2)
  double mc_floor;        // expected distance of an exact sample, ~0.8687/sqrt(m)
  bool decay_pass;        // first-to-last drop exceeds the summed DKW radii
  std::string note;
};

BerryEsseenReport mc_run(const ReplicationPlan& plan);

// Chaos-ratio and studentized discrete-LSE statistics on shared noise.
struct PairedStats {
  std::vector<double> chaos;
  std::vector<double> lse;
  double correlation;
};
PairedStats paired_statistics(const HurstModel& model, int n, int m, std::uint64_t seed);

// Energy-distance two-sample test with a permutation null.
struct EnergyTestResult {
  double statistic;
  double p_value;
  int permutations;
};
EnergyTestResult energy_two_sample_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                        int permutations, std::uint64_t seed);

}  // namespace fouest
