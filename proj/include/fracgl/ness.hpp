#pragma once

#include "fracgl/kernel.hpp"
#include "fracgl/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace fracgl {

struct StationaryProfile {
  ModelParams params;
  GridFunction profile;
  // max-norm residual of (D + B - P) Phi = Phi_l e_1 + Phi_r e_{n-1}
  double residual = 0.0;
};

StationaryProfile solve_stationary_profile(const ModelParams& params);
StationaryProfile solve_stationary_profile(const DriftSystem& sys);

// Embedded jump chain of the walk on Lambda_n with bulk rates p(y-x) and unit absorption
// rates 1 -> 0 and n-1 -> n.
class AbsorbedWalk {
 public:
  explicit AbsorbedWalk(const ModelParams& params);
  // absorption site: 0 or n
  int run(int x, Rng& rng) const;
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  // cdf_[x-1] over the targets 1..n-1 followed by the absorbing state
  std::vector<std::vector<double>> cdf_;
};

struct AbsorptionEstimate {
  double p_left = 0.0;
  double p_right = 0.0;
  double stderr_ = 0.0;
  long samples = 0;
};

AbsorptionEstimate absorbed_walk_oracle(const ModelParams& params, int x, long samples, std::uint64_t seed);

// Draw i uses the substream (seed, i).
std::vector<FieldState> sample_ness(const ModelParams& params, const StationaryProfile& profile, int count,
                                    std::uint64_t seed);
GridFunction sample_ness_one(const StationaryProfile& profile, Rng& rng);

// (1/n) sum_x [G(x) Phi_ss(x) + G(x)^2 / 2]
double static_cumulant(const ModelParams& params, const StationaryProfile& profile,
                       const Eigen::Ref<const Eigen::VectorXd>& G);

void write_profile_csv(std::ostream& os, const StationaryProfile& profile);

}  // namespace fracgl
