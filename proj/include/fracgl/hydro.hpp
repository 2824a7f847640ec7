#pragma once

#include "fracgl/field.hpp"
#include "fracgl/ness.hpp"
#include "fracgl/operators.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fracgl {

enum class HydroMethod { spectral_exact, rk4 };

// additive forcing u_t on the lattice
using Forcing = std::function<GridFunction(double)>;

struct HydroOptions {
  HydroMethod method = HydroMethod::spectral_exact;
  // forced spectral solves: exponential product integration on substeps of at most this length
  double substep = 1e-3;
  // rk4 step; 0 picks 0.05 / lambda_max
  double rk4_dt = 0.0;
};

struct DeterministicTrajectory {
  ModelParams params;
  std::vector<double> times;
  std::vector<GridFunction> profiles;
  std::optional<ExternalField> field;
};

// dPhi/dt = M Phi + b + u_t on a fixed lattice; owns the drift system, stationary profile and full spectrum.
class HydroSolver {
 public:
  explicit HydroSolver(const ModelParams& params);
  HydroSolver(DriftSystem sys, StationaryProfile profile, SpectralData full_spectrum);

  const ModelParams& params() const { return sys_.params; }
  const DriftSystem& system() const { return sys_; }
  const StationaryProfile& stationary() const { return profile_; }
  const SpectralData& spectrum() const { return spec_; }

  DeterministicTrajectory solve(const Eigen::Ref<const Eigen::VectorXd>& g, const std::vector<double>& times,
                                const Forcing* forcing = nullptr, const HydroOptions& options = {}) const;

  // the untilted solution at a single time, exact
  GridFunction relax(const Eigen::Ref<const Eigen::VectorXd>& g, double t) const;

 private:
  DeterministicTrajectory solve_spectral(const Eigen::Ref<const Eigen::VectorXd>& g, const std::vector<double>& times,
                                         const Forcing* forcing, const HydroOptions& options) const;
  DeterministicTrajectory solve_rk4(const Eigen::Ref<const Eigen::VectorXd>& g, const std::vector<double>& times,
                                    const Forcing* forcing, const HydroOptions& options) const;

  DriftSystem sys_;
  StationaryProfile profile_;
  SpectralData spec_;
  Eigen::MatrixXd q_;  // Euclidean-orthonormal eigenvectors of -M
};

// u_t = -L_n H_t
Forcing tilt_forcing(const ModelParams& params, const ExternalField& field);

DeterministicTrajectory solve_hydrodynamic(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g,
                                           const std::optional<ExternalField>& field, const std::vector<double>& times,
                                           HydroMethod method = HydroMethod::spectral_exact, HydroOptions options = {});

// Discrete weak-form residual
//   <Phi_t,G_t> - <g,G_0> - ∫ <Phi_s,(d_s + L_n) G_s> ds - ∫ <H_s,G_s>_{n,gamma/2} ds
// with (1/n) lattice pairings and the trapezoid rule over the recorded times up to t.
double weak_residual(const ModelParams& params, const DeterministicTrajectory& traj, const SpaceTimeFunction& G, double t);

// Least-squares decay rate of log ||Phi_t - Phi_ss|| over [T/2, T].
double relaxation_rate(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g, double T);
double relaxation_rate(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g, double T);

struct DecayRow {
  double t;
  double l2_distance;
  double bound;  // e^{-lambda_1 t} ||g - Phi_ss||
};

std::vector<DecayRow> decay_table(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g,
                                  const std::vector<double>& times);

struct EnergyBalance {
  double lhs;        // ||Phi_t - Phi_ss||^2
  double rhs;        // ||g - Phi_ss||^2 - 2 ∫ E_n(Phi_s - Phi_ss) ds
  double bulk_part;  // ∫ ||Phi_s - Phi_ss||^2_{n,gamma/2} ds
  double boundary_part;  // ∫ n^{gamma-1} (psi(1)^2 + psi(n-1)^2) ds
};

EnergyBalance energy_balance(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g, double t);

void write_hydro_csv(std::ostream& os, const DeterministicTrajectory& traj);
void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows);

}  // namespace fracgl
