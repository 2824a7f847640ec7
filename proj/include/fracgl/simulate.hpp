#pragma once

#include "fracgl/field.hpp"
#include "fracgl/ness.hpp"
#include "fracgl/random.hpp"
#include "fracgl/stats.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace fracgl {

enum class Scheme { euler, exact };

// edges: one driver per unordered bulk pair plus two reservoir drivers.
// factored: a single Cholesky factor of the diffusion matrix; same law, O(n^2) per step
// instead of O(#edges) normals. Girsanov accounting then needs H to vanish at sites 1 and n-1.
enum class NoiseModel { edges, factored };

// tilt: run under the perturbed generator and accumulate log dP^H/dP along the path.
// weight: run untilted and accumulate the likelihood ratio of H against that path.
enum class FieldMode { tilt, weight };

struct Trajectory {
  std::vector<double> times;
  std::vector<FieldState> states;
  std::optional<double> log_girsanov;
  Scheme scheme = Scheme::euler;
  double dt = 0.0;
  int record_every = 1;
};

struct TiltInput {
  const GridFunction* h = nullptr;          // H at the step start
  const GridFunction* laplacian = nullptr;  // L_n H at the step start
};

class EulerStepper {
 public:
  EulerStepper(const DriftSystem& sys, double dt, NoiseModel noise = NoiseModel::edges);

  // phi <- phi + dt (M phi + b + u) + noise, u = -L_n H under FieldMode::tilt.
  // With log_weight set, adds sum_e beta_e dW_e -/+ (1/2) sum_e beta_e^2 dt, beta_e = sigma_e (H_y - H_x) / 2.
  void advance(GridFunction& phi, Rng& rng, const TiltInput* tilt = nullptr, FieldMode mode = FieldMode::tilt,
               KahanSum* log_weight = nullptr) const;
  // drift part only
  void advance_deterministic(GridFunction& phi, const TiltInput* tilt = nullptr) const;

  double dt() const { return dt_; }
  const DriftSystem& system() const { return *sys_; }

 private:
  const DriftSystem* sys_;
  double dt_;
  NoiseModel noise_;
  Eigen::MatrixXd chol_;  // lower factor of a dt, factored model only
  std::vector<double> edge_scale_;  // sqrt(rate dt)
};

// Throws StabilityError unless dt n^gamma (1 + max row sum) < 0.5.
void check_euler_stability(const DriftSystem& sys, double dt);

FieldState step_euler(const FieldState& state, const DriftSystem& sys, const LatticeField* field, int step_index,
                      double dt, Rng& rng);

// Exact Gaussian transition of the untilted dynamics.
class ExactPropagator {
 public:
  ExactPropagator(const DriftSystem& sys, const StationaryProfile& profile);
  GridFunction propagate(const Eigen::Ref<const Eigen::VectorXd>& phi, double t, Rng& rng) const;
  GridFunction mean(const Eigen::Ref<const Eigen::VectorXd>& phi, double t) const;

 private:
  GridFunction stationary_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd rates_;  // eigenvalues of M, negative
};

FieldState propagate_exact(const FieldState& state, const DriftSystem& sys, const StationaryProfile& profile, double t,
                           Rng& rng);

struct SimulationOptions {
  Scheme scheme = Scheme::euler;
  double dt = 1e-3;
  int record_every = 1;
  NoiseModel noise = NoiseModel::edges;
  std::optional<ExternalField> field;
  FieldMode field_mode = FieldMode::tilt;
};

// Prepares steppers and field caches once; run() is const and safe to call from several threads.
class Simulator {
 public:
  Simulator(const DriftSystem& sys, const StationaryProfile& profile, double T, SimulationOptions options);

  Trajectory run(const FieldState& init, Rng& rng) const;
  // terminal state only; log_weight receives log M_T^H when a field is present
  FieldState run_terminal(const FieldState& init, Rng& rng, double* log_weight = nullptr) const;

  int steps() const { return steps_; }
  double dt() const { return dt_; }
  const LatticeField* lattice_field() const { return field_.get(); }
  const DriftSystem& system() const { return *sys_; }

 private:
  template <class Visit>
  double evolve(GridFunction& phi, Rng& rng, Visit&& visit) const;

  const DriftSystem* sys_;
  SimulationOptions options_;
  int steps_;
  double dt_;
  std::unique_ptr<EulerStepper> euler_;
  std::unique_ptr<ExactPropagator> exact_;
  std::unique_ptr<LatticeField> field_;
};

Trajectory simulate_trajectory(const DriftSystem& sys, const StationaryProfile& profile, const FieldState& init, double T,
                               const SimulationOptions& options, std::uint64_t seed, std::uint64_t replica = 0);

// (1/(n-1)) sum_x G(x) phi(x)
double empirical_pairing(const FieldState& state, const Eigen::Ref<const Eigen::VectorXd>& G);

enum class Side { left, right };

// mean of phi over the floor(eps n) sites adjacent to the chosen reservoir
double boundary_block_average(const FieldState& state, Side side, double eps);

struct DynkinSample {
  double martingale = 0.0;
  double predicted_qv = 0.0;
};

// M_T(G) = <pi_T,G> - <pi_0,G> - ∫ (1/(n-1)) G^T (M phi + b + u) ds along a densely recorded path,
// with the deterministic quadratic variation T (n^gamma/(n-1)^2) [sum_{x,y} p (G_y-G_x)^2 + 2 (G_1^2 + G_{n-1}^2)].
DynkinSample dynkin_martingale(const DriftSystem& sys, const Trajectory& traj, const Eigen::Ref<const Eigen::VectorXd>& G,
                               const LatticeField* field = nullptr);

struct DynkinReport {
  long replicas = 0;
  double mean = 0.0;
  double mean_stderr = 0.0;
  double variance = 0.0;
  double variance_stderr = 0.0;
  double predicted_qv = 0.0;
};

DynkinReport dynkin_diagnostics(const std::vector<DynkinSample>& samples);

// Runs fn(r) for r in [0, count) on up to `threads` workers (0 = hardware concurrency).
// Each replica writes only its own slot, so results do not depend on the schedule.
void for_each_replica(long count, const std::function<void(long)>& fn, unsigned threads = 0);

void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

}  // namespace fracgl
