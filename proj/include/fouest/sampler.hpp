#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>

#include "fouest/core.hpp"
#include "fouest/gram.hpp"

namespace fouest {

enum class SamplerMethod { circulant, cholesky };

struct SamplerConfig {
  SamplerMethod method;
  std::uint64_t seed;
  int n;
  HurstModel model;
  int cholesky_cap = 4096;
};

// m rows of fBm increment draws on the grid; cumulative sums give paths
// started at zero.  Row r is a pure function of (seed, first_replicate + r).
struct PathBatch {
  UniformGrid grid;
  Eigen::MatrixXd increments;  // m x n
  SamplerConfig provenance;
  std::uint64_t first_replicate = 0;

  int m() const { return static_cast<int>(increments.rows()); }
};

// Stationary autocovariance of the increments,
// gamma(k) = (|k+1|^2H - 2|k|^2H + |k-1|^2H) / 2 * step^2H;
// equals the Gram entry (i, i+k) for every admissible i.
double autocov_stationary(const HurstModel& model, const UniformGrid& grid, int lag);

// Exact draws via circulant embedding of size 2n diagonalized by FFT.
// Aborts when the embedding has an eigenvalue below -1e-8 * max; smaller
// negative eigenvalues are clamped to zero and the clamped mass recorded.
struct CirculantPlan {
  UniformGrid grid;
  Eigen::VectorXd sqrt_eigenvalues;  // size 2n
  double clamped_mass_fraction = 0.0;
};
CirculantPlan circulant_plan(const HurstModel& model, const UniformGrid& grid);

PathBatch sample_circulant(const SamplerConfig& cfg, int m,
                           std::uint64_t first_replicate = 0);

// Exact draws through a dense Cholesky factor of the increment Gram matrix;
// the distributional oracle for the circulant method.  n is capped.
PathBatch sample_cholesky(const SamplerConfig& cfg, int m,
                          std::uint64_t first_replicate = 0);

// Binary dump: little-endian header (magic "FOUBATCH", version, method, H,
// theta, horizon, n, m, seed, first_replicate) followed by row-major float64
// increments.
void write_batch(const PathBatch& batch, const std::filesystem::path& file);
PathBatch read_batch(const std::filesystem::path& file);

}  // namespace fouest
