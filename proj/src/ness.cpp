#include "fracgl/ness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace fracgl {

StationaryProfile solve_stationary_profile(const ModelParams& params) {
  return solve_stationary_profile(build_drift_system(params));
}

StationaryProfile solve_stationary_profile(const DriftSystem& sys) {
  const double s = speed(sys.params);
  const Eigen::MatrixXd a = -sys.m / s;
  const Eigen::VectorXd rhs = sys.b / s;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw NumericalError("solve_stationary_profile: system is not positive definite");
  StationaryProfile out;
  out.params = sys.params;
  out.profile = llt.solve(rhs);
  out.residual = (a * out.profile - rhs).cwiseAbs().maxCoeff();
  if (!(out.residual <= 1e-10)) throw ResidualError("solve_stationary_profile: residual above 1e-10", out.residual);
  return out;
}

AbsorbedWalk::AbsorbedWalk(const ModelParams& params) : params_(params) {
  validate(params);
  const int size = params.n - 1;
  const Eigen::VectorXd p = jump_table(params.gamma, size);
  cdf_.assign(static_cast<std::size_t>(size), std::vector<double>(static_cast<std::size_t>(size) + 1, 0.0));
  for (int i = 0; i < size; ++i) {
    auto& row = cdf_[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int j = 0; j < size; ++j) {
      acc += p(std::abs(i - j));
      row[static_cast<std::size_t>(j)] = acc;
    }
    if (i == 0 || i == size - 1) acc += 1.0;
    row[static_cast<std::size_t>(size)] = acc;
    for (auto& v : row) v /= acc;
  }
}

int AbsorbedWalk::run(int x, Rng& rng) const {
  const int size = params_.n - 1;
  if (x < 1 || x > size) throw DomainError("AbsorbedWalk::run: start outside Lambda_n");
  int i = x - 1;
  for (;;) {
    const auto& row = cdf_[static_cast<std::size_t>(i)];
    const double u = rng.uniform();
    const auto target = static_cast<int>(std::upper_bound(row.begin(), row.end(), u) - row.begin());
    if (target >= size) {
      // absorbing slot, only reachable from sites 1 and n-1
      return i == 0 ? 0 : params_.n;
    }
    i = target;
  }
}

AbsorptionEstimate absorbed_walk_oracle(const ModelParams& params, int x, long samples, std::uint64_t seed) {
  if (samples < 1) throw DomainError("absorbed_walk_oracle: samples must be positive");
  const AbsorbedWalk walk(params);
  Rng rng(seed, static_cast<std::uint64_t>(x));
  long right = 0;
  for (long s = 0; s < samples; ++s)
    if (walk.run(x, rng) == params.n) ++right;
  AbsorptionEstimate est;
  est.samples = samples;
  est.p_right = static_cast<double>(right) / samples;
  est.p_left = 1.0 - est.p_right;
  est.stderr_ = std::sqrt(std::max(est.p_right * est.p_left, 1.0 / samples) / samples);
  return est;
}

GridFunction sample_ness_one(const StationaryProfile& profile, Rng& rng) {
  GridFunction phi(profile.profile.size());
  for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = profile.profile(i) + rng.normal();
  return phi;
}

std::vector<FieldState> sample_ness(const ModelParams& params, const StationaryProfile& profile, int count,
                                    std::uint64_t seed) {
  require_grid(params, profile.profile, "sample_ness");
  std::vector<FieldState> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int r = 0; r < count; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    out.push_back({sample_ness_one(profile, rng), 0.0});
  }
  return out;
}

double static_cumulant(const ModelParams& params, const StationaryProfile& profile,
                       const Eigen::Ref<const Eigen::VectorXd>& G) {
  require_grid(params, G, "static_cumulant");
  return (G.dot(profile.profile) + 0.5 * G.squaredNorm()) / params.n;
}

void write_profile_csv(std::ostream& os, const StationaryProfile& profile) {
  const int n = profile.params.n;
  os << "x,u,phi_ss\n";
  os.precision(17);
  for (int x = 1; x < n; ++x) os << x << ',' << static_cast<double>(x) / n << ',' << profile.profile(x - 1) << '\n';
}

}  // namespace fracgl
