#include "fracgl/ldp.hpp"

#include "fracgl/quadrature.hpp"
#include "fracgl/random.hpp"

#include <cmath>
#include <limits>

namespace fracgl {

double j_functional(const ModelParams& params, const DeterministicTrajectory& traj,
                    const Eigen::Ref<const Eigen::VectorXd>& g, const ExternalField& H) {
  validate_field(H);
  require_grid(params, g, "j_functional");
  if (traj.times.size() < 2 || traj.times.size() != traj.profiles.size() || traj.times.front() != 0.0)
    throw DomainError("j_functional: trajectory must span [0,T] from t = 0");
  const int n = params.n;
  const DiscreteLaplacian lap(params);
  std::vector<double> integrand;
  integrand.reserve(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double s = traj.times[k];
    const GridFunction hs = H.on_lattice(n, s);
    integrand.push_back(lattice_pairing(traj.profiles[k], H.time_derivative_on_lattice(n, s) + lap.apply(hs)) +
                        discrete_seminorm_squared(params, hs));
  }
  const double T = traj.times.back();
  return lattice_pairing(traj.profiles.back(), H.on_lattice(n, T)) - lattice_pairing(g, H.on_lattice(n, 0.0)) -
         trapezoid(traj.times, integrand);
}

double rate_from_field(const ModelParams& params, const ExternalField& H, double T, int time_steps) {
  validate_field(H);
  if (T == 0.0) return 0.0;
  if (time_steps < 2 || time_steps % 2 != 0) throw DomainError("rate_from_field: time_steps must be even");
  const double h = T / time_steps;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(time_steps) + 1);
  for (int k = 0; k <= time_steps; ++k) v.push_back(discrete_seminorm_squared(params, H.on_lattice(params.n, k * h)));
  return 0.25 * simpson(v, h);
}

double static_rate_w(const ModelParams& params, const StationaryProfile& profile,
                     const Eigen::Ref<const Eigen::VectorXd>& rho) {
  require_grid(params, rho, "static_rate_w");
  return 0.5 * (rho - profile.profile).squaredNorm() / params.n;
}

LegendreCheck legendre_static_rate(const ModelParams& params, const StationaryProfile& profile,
                                   const Eigen::Ref<const Eigen::VectorXd>& rho, int family_size, std::uint64_t seed) {
  require_grid(params, rho, "legendre_static_rate");
  // <rho,G> - F_n(G)/n
  auto objective = [&](const GridFunction& G) {
    return (G.dot(rho) - G.dot(profile.profile) - 0.5 * G.squaredNorm()) / params.n;
  };
  LegendreCheck out;
  out.w = static_rate_w(params, profile, rho);
  const GridFunction best = rho - profile.profile;
  out.value_at_maximizer = objective(best);
  out.family_size = family_size;
  Rng rng(seed, 0);
  out.family_sup = -std::numeric_limits<double>::infinity();
  const double scale = std::max(1e-3, std::sqrt(best.squaredNorm() / best.size()));
  for (int j = 0; j < family_size; ++j) {
    GridFunction eta(best.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) eta(i) = rng.normal();
    // perturbation sizes from 1e-4 to 1 relative to the maximizer
    const double size = scale * std::pow(10.0, -4.0 + 4.0 * rng.uniform());
    out.family_sup = std::max(out.family_sup, objective(best + size * eta / std::sqrt(eta.squaredNorm() / eta.size())));
  }
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 400; ++i) {
    const double theta = i / 200.0;
    const double v = objective(theta * best);
    if (v > best_value) {
      best_value = v;
      out.scan_argmax = theta;
    }
  }
  return out;
}

namespace {

// (2 e^{lambda (t-1)} - e^{-lambda}) / (1 - e^{-lambda}) = (2 e^{lambda t} - 1)/(e^{lambda} - 1)
double clever_profile(double lambda, double t) {
  return (2.0 * std::exp(lambda * (t - 1.0)) - std::exp(-lambda)) / (-std::expm1(-lambda));
}

}  // namespace

CleverPath clever_path(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& psi,
                       const CleverPathOptions& options) {
  const ModelParams& params = solver.params();
  const SpectralData& spec = solver.spectrum();
  const GridFunction& ss = solver.stationary().profile;
  require_grid(params, psi, "clever_path");
  const GridFunction target = psi - ss;
  const double energy = target.squaredNorm() / params.n;
  const double residual = spec.projection_residual(target);
  if (residual > options.mode_tolerance * energy)
    throw ResidualError("clever_path: target not resolved by the retained modes", residual / std::max(energy, 1e-300));
  const Eigen::VectorXd a = spec.coefficients(target);
  const Eigen::VectorXd& lambda = spec.eigenvalues;

  auto field_at = [&](double t) {
    Eigen::VectorXd c(a.size());
    for (Eigen::Index k = 0; k < a.size(); ++k) c(k) = clever_profile(lambda(k), t) * a(k);
    return c;
  };
  auto h_at = [&](double t) { return inverse_dirichlet_apply(spec, spec.synthesize(lambda.cwiseProduct(field_at(t)))); };
  const Forcing forcing = [&](double t) -> GridFunction { return spec.synthesize(lambda.cwiseProduct(field_at(t))); };

  std::vector<double> times;
  for (int i = 0; i < options.recorded_times; ++i) times.push_back(static_cast<double>(i) / (options.recorded_times - 1));
  HydroOptions ho;
  ho.substep = std::min(options.substep, 2.0 / lambda.maxCoeff());
  CleverPath out;
  out.path = solver.solve(ss, times, &forcing, ho);
  out.endpoint_error = lattice_l2(out.path.profiles.back() - psi);
  if (!(out.endpoint_error <= 1e-6 * std::max(1.0, std::sqrt(energy))))
    throw NumericalError("clever_path: endpoint misses the target by " + std::to_string(out.endpoint_error));

  // e^{2 lambda (t-1)} concentrates the cost near t = 1
  const GaussLegendre gl(16);
  const auto breaks = graded_breaks(0.0, 1.0, 0.05 / lambda.maxCoeff(), true);
  const double scale = speed(params) / params.n;
  out.cost_bulk = 0.25 * gl.integrate([&](double t) { return discrete_seminorm_squared(params, h_at(t)); }, breaks);
  out.cost_boundary = 0.25 * gl.integrate(
                                 [&](double t) {
                                   const GridFunction h = h_at(t);
                                   return scale * (h(0) * h(0) + h(h.size() - 1) * h(h.size() - 1));
                                 },
                                 breaks);
  out.cost = out.cost_bulk + out.cost_boundary;
  return out;
}

RateReport quasipotential(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& rho, double T1) {
  if (!(T1 > 0.0)) throw DomainError("quasipotential: T1 must be positive");
  const ModelParams& params = solver.params();
  require_grid(params, rho, "quasipotential");
  if (!rho.allFinite()) throw DomainError("quasipotential: target must be finite");
  const StationaryProfile& profile = solver.stationary();
  const GridFunction& ss = profile.profile;

  RateReport r;
  r.functional = "quasipotential";
  r.n = params.n;
  const GridFunction relaxed = solver.relax(rho, T1);
  const double w_rho = static_rate_w(params, profile, rho);
  const double w_relaxed = static_rate_w(params, profile, relaxed);

  double bridge = 0.0;
  if ((relaxed - ss).squaredNorm() > 0.0) {
    const CleverPath cp = clever_path(solver, relaxed);
    bridge = cp.cost;
    r.breakdown["bridge_endpoint_error"] = cp.endpoint_error;
  }
  // reversed path lambda*_t = Phi_{T1 - t} driven by H* = 2 (lambda* - Phi_ss); its cost is ∫ E_n(Phi_s - Phi_ss) ds
  const GaussLegendre gl(16);
  const double lambda_max = solver.spectrum().eigenvalues.maxCoeff();
  const auto breaks = graded_breaks(0.0, T1, 0.05 / lambda_max, false);
  const double scale = speed(params) / params.n;
  const double bulk = gl.integrate([&](double s) { return discrete_seminorm_squared(params, solver.relax(rho, s) - ss); }, breaks);
  const double boundary = gl.integrate(
      [&](double s) {
        const GridFunction p = solver.relax(rho, s) - ss;
        return scale * (p(0) * p(0) + p(p.size() - 1) * p(p.size() - 1));
      },
      breaks);
  const double reversal = bulk + boundary;
  r.value = bridge + reversal;
  r.dt = 0.0;
  r.breakdown["bridge_cost"] = bridge;
  r.breakdown["reversal_cost"] = reversal;
  r.breakdown["reversal_bulk"] = bulk;
  r.breakdown["reversal_boundary"] = boundary;
  r.breakdown["w_rho"] = w_rho;
  r.breakdown["w_relaxed"] = w_relaxed;
  r.breakdown["identity_gap"] = reversal - (w_rho - w_relaxed);
  r.breakdown["T1"] = T1;
  r.breakdown["lambda1_T1"] = solver.spectrum().eigenvalues(0) * T1;
  return r;
}

GammaIdentity gamma_identity(const ModelParams& params, const StationaryProfile& profile,
                             const Eigen::Ref<const Eigen::VectorXd>& rho) {
  require_grid(params, rho, "gamma_identity");
  const GridFunction gamma = rho - profile.profile;
  const auto& ss = profile.profile;
  const Eigen::Index last = ss.size() - 1;
  GammaIdentity out;
  out.lhs = discrete_seminorm_squared(params, gamma) - discrete_inner_seminorm(params, gamma, rho);
  out.predicted = -speed(params) / params.n *
                  (gamma(0) * (params.phi_l - ss(0)) + gamma(last) * (params.phi_r - ss(last)));
  return out;
}

}  // namespace fracgl
