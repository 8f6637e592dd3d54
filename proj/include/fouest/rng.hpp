#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fouest {

// Philox4x32-10 block cipher (Salmon et al. 2011).  Pure function of
// (counter, key); the basis of all randomness in the project.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Stream of standard Gaussians fully determined by (seed, stream, index).
// Distinct streams never collide, so replicates can be generated on any
// number of workers in any order.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  // Uniform on (0,1) with 53-bit resolution, draw index i.
  double uniform(std::uint64_t i) const;
  // Standard normal via the inverse CDF, draw index i.
  double gaussian(std::uint64_t i) const;
  void fill_gaussian(std::span<double> out, std::uint64_t first_index = 0) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

// Standard normal CDF.
double normal_cdf(double x);

// Inverse of the standard normal CDF (Wichura's AS 241, double precision).
double normal_quantile(double p);

}  // namespace fouest
