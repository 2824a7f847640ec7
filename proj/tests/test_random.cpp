#include <doctest.h>

#include "fracgl/random.hpp"
#include "fracgl/stats.hpp"

#include <cmath>
#include <vector>

using namespace fracgl;

TEST_SUITE("random") {
  TEST_CASE("philox known-answer vectors") {
    const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);
    const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
  }

  TEST_CASE("streams are reproducible and replica-disjoint") {
    Rng a(42, 3), b(42, 3), c(42, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
      const auto x = a(), y = b(), z = c();
      CHECK(x == y);
      differs = differs || (x != z);
    }
    CHECK(differs);
  }

  TEST_CASE("normal variates have unit variance") {
    Rng rng(7, 0);
    std::vector<double> xs(200000);
    for (auto& x : xs) x = rng.normal();
    const auto m = mean_estimate(xs);
    const auto v = variance_estimate(xs);
    CHECK(std::fabs(m.value) < 4 * m.stderr_);
    CHECK(std::fabs(v.value - 1.0) < 4 * v.stderr_);
  }

  TEST_CASE("uniforms stay inside the open unit interval") {
    Rng rng(1, 1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
  }
}
