#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fracgl {

// Philox4x32-10 counter-based bijection.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

// Stream of uniform and normal variates keyed by (seed, replica).
// Block j of replica r is philox4x32({j_lo, j_hi, r_lo, r_hi}, {seed_lo, seed_hi}), so every
// replica owns a disjoint counter range and results do not depend on thread scheduling.
class Rng {
 public:
  using result_type = std::uint32_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t replica = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // uniform on (0,1), 53-bit resolution, never exactly 0
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t replica_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace fracgl
