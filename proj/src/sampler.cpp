#include "fouest/sampler.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>
#include <unsupported/Eigen/FFT>

#include "fouest/errors.hpp"
#include "fouest/parallel.hpp"
#include "fouest/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "batch dump format requires a little-endian host");

namespace fouest {

double autocov_stationary(const HurstModel& model, const UniformGrid& grid, int lag) {
  if (lag < 0) throw std::invalid_argument("autocov_stationary: lag must be >= 0");
  const long double h2 = 2.0L * model.hurst;
  const long double k = lag;
  const long double raw =
      (std::pow(k + 1, h2) - 2 * std::pow(k, h2) + std::pow(std::abs(k - 1), h2)) / 2.0L;
  return static_cast<double>(raw * std::pow(static_cast<long double>(grid.step()), h2));
}

CirculantPlan circulant_plan(const HurstModel& model, const UniformGrid& grid) {
  const int n = grid.n;
  const int size = 2 * n;
  Eigen::VectorXd first_row(size);
  for (int j = 0; j < size; ++j)
    first_row[j] = autocov_stationary(model, grid, std::min(j, size - j));

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq(size);
  std::vector<double> row(first_row.data(), first_row.data() + size);
  fft.fwd(freq, row);

  Eigen::VectorXd eig(size);
  for (int j = 0; j < size; ++j) eig[j] = freq[j].real();
  const double max_eig = eig.maxCoeff();
  const double min_eig = eig.minCoeff();
  if (min_eig < -1e-8 * max_eig)
    throw numeric_error("circulant_plan: embedding not positive semidefinite (min " +
                        std::to_string(min_eig) + " vs max " + std::to_string(max_eig) +
                        "); refusing to clamp");
  double clamped = 0.0;
  for (int j = 0; j < size; ++j) {
    if (eig[j] < 0.0) {
      clamped += -eig[j];
      eig[j] = 0.0;
    }
  }
  CirculantPlan plan{grid, eig.cwiseSqrt(), clamped / eig.sum()};
  return plan;
}

namespace {

// One replicate: 2n Gaussians shaped in the frequency domain, one inverse
// FFT, first n entries of the real part.
void circulant_row(const CirculantPlan& plan, const CounterRng& rng,
                   Eigen::FFT<double>& fft, std::vector<std::complex<double>>& freq,
                   std::vector<std::complex<double>>& time, double* out) {
  const int n = plan.grid.n;
  const int size = 2 * n;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  freq[0] = plan.sqrt_eigenvalues[0] * rng.gaussian(0);
  freq[n] = plan.sqrt_eigenvalues[n] * rng.gaussian(1);
  for (int k = 1; k < n; ++k) {
    const double re = rng.gaussian(2 * k) * inv_sqrt2;
    const double im = rng.gaussian(2 * k + 1) * inv_sqrt2;
    freq[k] = plan.sqrt_eigenvalues[k] * std::complex<double>(re, im);
    freq[size - k] = std::conj(freq[k]);
  }
  fft.inv(time, freq);  // (1/size) sum freq_k e^{+2 pi i jk/size}
  const double scale = std::sqrt(static_cast<double>(size));
  for (int j = 0; j < n; ++j) out[j] = time[j].real() * scale;
}

}  // namespace

PathBatch sample_circulant(const SamplerConfig& cfg, int m,
                           std::uint64_t first_replicate) {
  if (cfg.method != SamplerMethod::circulant)
    throw std::invalid_argument("sample_circulant: config method mismatch");
  const UniformGrid grid(cfg.n, cfg.model.horizon);
  const CirculantPlan plan = circulant_plan(cfg.model, grid);
  Eigen::MatrixXd rows(m, cfg.n);
  parallel_for(m, [&](std::int64_t r) {
    thread_local Eigen::FFT<double> fft;
    thread_local std::vector<std::complex<double>> freq, time;
    freq.assign(2 * cfg.n, {});
    time.assign(2 * cfg.n, {});
    Eigen::VectorXd row(cfg.n);
    const CounterRng rng(cfg.seed, first_replicate + static_cast<std::uint64_t>(r));
    circulant_row(plan, rng, fft, freq, time, row.data());
    rows.row(r) = row;
  });
  return PathBatch{grid, std::move(rows), cfg, first_replicate};
}

PathBatch sample_cholesky(const SamplerConfig& cfg, int m,
                          std::uint64_t first_replicate) {
  if (cfg.n > cfg.cholesky_cap)
    throw std::invalid_argument("sample_cholesky: n exceeds the configured cap");
  const UniformGrid grid(cfg.n, cfg.model.horizon);
  const IncrementGram gram = increment_gram(cfg.model, grid);
  Eigen::LLT<Eigen::MatrixXd> llt(gram.entries);
  if (llt.info() != Eigen::Success) {
    // locate the failing leading minor for the diagnostic
    int bad = cfg.n;
    for (int k = 1; k <= cfg.n; ++k) {
      Eigen::LLT<Eigen::MatrixXd> sub(gram.entries.topLeftCorner(k, k));
      if (sub.info() != Eigen::Success) {
        bad = k;
        break;
      }
    }
    throw numeric_error("sample_cholesky: factorization failed at leading minor " +
                        std::to_string(bad));
  }
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd rows(m, cfg.n);
  // stream ids disjoint from the circulant sampler's
  constexpr std::uint64_t kCholeskyStreamBit = 1ull << 63;
  parallel_for(m, [&](std::int64_t r) {
    Eigen::VectorXd z(cfg.n);
    const CounterRng rng(cfg.seed,
                         kCholeskyStreamBit | (first_replicate + static_cast<std::uint64_t>(r)));
    rng.fill_gaussian({z.data(), static_cast<std::size_t>(cfg.n)});
    rows.row(r) = (L * z).transpose();
  });
  return PathBatch{grid, std::move(rows), cfg, first_replicate};
}

namespace {

constexpr char kMagic[8] = {'F', 'O', 'U', 'B', 'A', 'T', 'C', 'H'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void write_batch(const PathBatch& batch, const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("write_batch: cannot open " + file.string());
  os.write(kMagic, sizeof(kMagic));
  put(os, kVersion);
  put(os, static_cast<std::uint32_t>(batch.provenance.method));
  put(os, batch.provenance.model.hurst);
  put(os, batch.provenance.model.theta);
  put(os, batch.provenance.model.horizon);
  put(os, static_cast<std::uint64_t>(batch.grid.n));
  put(os, static_cast<std::uint64_t>(batch.m()));
  put(os, batch.provenance.seed);
  put(os, batch.first_replicate);
  for (int r = 0; r < batch.m(); ++r)
    os.write(reinterpret_cast<const char*>(Eigen::VectorXd(batch.increments.row(r)).data()),
             static_cast<std::streamsize>(sizeof(double)) * batch.grid.n);
  if (!os) throw std::runtime_error("write_batch: short write to " + file.string());
}

PathBatch read_batch(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("read_batch: cannot open " + file.string());
  char magic[8];
  is.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("read_batch: bad magic in " + file.string());
  if (get<std::uint32_t>(is) != kVersion)
    throw std::runtime_error("read_batch: unsupported version in " + file.string());
  const auto method = static_cast<SamplerMethod>(get<std::uint32_t>(is));
  const double hurst = get<double>(is);
  const double theta = get<double>(is);
  const double horizon = get<double>(is);
  const auto n = static_cast<int>(get<std::uint64_t>(is));
  const auto m = static_cast<int>(get<std::uint64_t>(is));
  const auto seed = get<std::uint64_t>(is);
  const auto first_replicate = get<std::uint64_t>(is);
  SamplerConfig cfg{method, seed, n, HurstModel(hurst, theta, horizon)};
  Eigen::MatrixXd rows(m, n);
  Eigen::VectorXd row(n);
  for (int r = 0; r < m; ++r) {
    is.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(sizeof(double)) * n);
    rows.row(r) = row;
  }
  if (!is) throw std::runtime_error("read_batch: truncated file " + file.string());
  return PathBatch{UniformGrid(n, horizon), std::move(rows), cfg, first_replicate};
}

}  // namespace fouest
