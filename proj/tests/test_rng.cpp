#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fouest/rng.hpp"

using namespace fouest;

TEST_SUITE_BEGIN("rng");

TEST_CASE("philox4x32-10 known-answer vectors") {
  // reference vectors from the Random123 test suite
  {
    const auto out = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const auto out = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const auto out = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("counter rng streams") {
  const CounterRng a(42, 0), b(42, 1), a2(42, 0);
  SUBCASE("deterministic per (seed, stream, index)") {
    for (std::uint64_t i = 0; i < 64; ++i) CHECK(a.uniform(i) == a2.uniform(i));
  }
  SUBCASE("streams differ") {
    int same = 0;
    for (std::uint64_t i = 0; i < 64; ++i) same += a.uniform(i) == b.uniform(i);
    CHECK(same == 0);
  }
  SUBCASE("uniforms strictly inside (0,1)") {
    for (std::uint64_t i = 0; i < 4096; ++i) {
      const double u = a.uniform(i);
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
  }
}

TEST_CASE("normal quantile and cdf") {
  SUBCASE("round trip") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-9}) {
      CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
    }
  }
  SUBCASE("known quantiles") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(normal_quantile(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("domain") {
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
  }
  SUBCASE("gaussian moments over a long stream") {
    const CounterRng rng(7, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      const double z = rng.gaussian(i);
      s += z;
      s2 += z * z;
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(mean) < 5.0 / std::sqrt(double(n)));
    CHECK(std::abs(var - 1.0) < 5.0 * std::sqrt(2.0 / n));
  }
}

TEST_SUITE_END();
