#pragma once

#include "fracgl/hydro.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace fracgl {

struct RateReport {
  std::string functional;
  double value = 0.0;
  std::map<std::string, double> breakdown;
  int n = 0;
  double dt = 0.0;
};

// <pi_T,H_T> - <g,H_0> - ∫ <pi_s,(d_s + L_n) H_s> ds - ∫ ||H_s||^2_{n,gamma/2} ds, trapezoid in time
double j_functional(const ModelParams& params, const DeterministicTrajectory& traj,
                    const Eigen::Ref<const Eigen::VectorXd>& g, const ExternalField& H);

// (1/4) ∫_0^T ||H_t||^2_{n,gamma/2} dt, composite Simpson with `time_steps` (even) intervals
double rate_from_field(const ModelParams& params, const ExternalField& H, double T, int time_steps = 1000);

// (1/2)(1/n) sum_x (rho(x) - Phi_ss(x))^2
double static_rate_w(const ModelParams& params, const StationaryProfile& profile,
                     const Eigen::Ref<const Eigen::VectorXd>& rho);

struct LegendreCheck {
  double w = 0.0;               // static_rate_w(rho)
  double value_at_maximizer = 0.0;  // <rho,G*> - F_n(G*)/n at G* = rho - Phi_ss
  double family_sup = 0.0;      // sup over the random family, maximizer excluded
  double scan_argmax = 0.0;     // best theta on the ray theta G*
  int family_size = 0;
};

// sup_G { <rho,G> - F_n(G)/n } over G* plus a random family of perturbations and a scan along theta G*
LegendreCheck legendre_static_rate(const ModelParams& params, const StationaryProfile& profile,
                                   const Eigen::Ref<const Eigen::VectorXd>& rho, int family_size = 200,
                                   std::uint64_t seed = 7);

struct CleverPath {
  DeterministicTrajectory path;  // Phi on [0,1]
  double cost = 0.0;             // (1/4) ∫ E_n(H_t) dt
  double cost_bulk = 0.0;        // seminorm part
  double cost_boundary = 0.0;    // reservoir part
  double endpoint_error = 0.0;   // ||Phi_1 - Psi||_2
};

struct CleverPathOptions {
  int recorded_times = 101;
  double substep = 1e-3;
  double mode_tolerance = 1e-8;
};

// T_t = sum_k lambda_k (2 e^{lambda_k t} - 1)/(e^{lambda_k} - 1) <Psi - Phi_ss, e_k> e_k and H_t = (-M)^{-1} T_t.
// Phi solves dPhi/dt = M Phi + b + T_t from Phi_ss and reaches Psi at t = 1.
CleverPath clever_path(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& psi,
                       const CleverPathOptions& options = {});

// Relax rho for T1, bridge Phi_ss -> Phi_{T1} by the clever path, then follow the reversed relaxation.
RateReport quasipotential(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& rho, double T1);

struct GammaIdentity {
  double lhs = 0.0;        // ||Gamma||^2_{n,gamma/2} - <Gamma, rho>_{n,gamma/2}
  double predicted = 0.0;  // -n^{gamma-1} [Gamma(1)(Phi_l - Phi_ss(1)) + Gamma(n-1)(Phi_r - Phi_ss(n-1))]
};

GammaIdentity gamma_identity(const ModelParams& params, const StationaryProfile& profile,
                             const Eigen::Ref<const Eigen::VectorXd>& rho);

}  // namespace fracgl
