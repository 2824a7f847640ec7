#include "fracgl/hydro.hpp"

#include "fracgl/quadrature.hpp"

#include <cmath>
#include <map>
#include <ostream>

namespace fracgl {

namespace {

constexpr int kProductNodes = 8;

void require_times(const std::vector<double>& times) {
  if (times.empty() || times.front() != 0.0) throw DomainError("times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("times must be strictly ascending");
}

// Lagrange basis polynomial j on the nodes, evaluated at x
double lagrange(const Eigen::VectorXd& nodes, int j, double x) {
  double v = 1.0;
  for (int m = 0; m < nodes.size(); ++m)
    if (m != j) v *= (x - nodes(m)) / (nodes(j) - nodes(m));
  return v;
}

// W(k,j) = h ∫_0^1 exp(-lambda_k h (1 - tau)) l_j(tau) d tau
Eigen::MatrixXd product_weights(const Eigen::VectorXd& lambda, double h, const Eigen::VectorXd& nodes01) {
  const GaussLegendre fine(16);
  Eigen::MatrixXd w(lambda.size(), kProductNodes);
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    const double z = lambda(k) * h;
    // beyond 1 - 40/z the exponential is below e^{-40}
    const double lo = z > 40.0 ? 1.0 - 40.0 / z : 0.0;
    const int panels = 1 + static_cast<int>(std::min(z, 40.0) / 2.0);
    for (int j = 0; j < kProductNodes; ++j) {
      auto integrand = [&](double tau) { return std::exp(-z * (1.0 - tau)) * lagrange(nodes01, j, tau); };
      double acc = 0.0;
      const double width = (1.0 - lo) / panels;
      for (int p = 0; p < panels; ++p) acc += fine.integrate(integrand, lo + p * width, lo + (p + 1) * width);
      w(k, j) = h * acc;
    }
  }
  return w;
}

}  // namespace

HydroSolver::HydroSolver(const ModelParams& params)
    : sys_(build_drift_system(params)),
      profile_(solve_stationary_profile(sys_)),
      spec_(dirichlet_spectrum(params, params.n - 1)),
      q_(spec_.eigenvectors / std::sqrt(static_cast<double>(params.n))) {}

HydroSolver::HydroSolver(DriftSystem sys, StationaryProfile profile, SpectralData full_spectrum)
    : sys_(std::move(sys)), profile_(std::move(profile)), spec_(std::move(full_spectrum)) {
  if (spec_.n != sys_.params.n || spec_.size() != sys_.params.n - 1)
    throw DimensionError("HydroSolver: the full spectrum of the same lattice is required");
  q_ = spec_.eigenvectors / std::sqrt(static_cast<double>(spec_.n));
}

GridFunction HydroSolver::relax(const Eigen::Ref<const Eigen::VectorXd>& g, double t) const {
  require_grid(sys_.params, g, "relax");
  const Eigen::VectorXd d = q_.transpose() * (g - profile_.profile);
  return profile_.profile + q_ * (-spec_.eigenvalues.array() * t).exp().matrix().cwiseProduct(d);
}

DeterministicTrajectory HydroSolver::solve(const Eigen::Ref<const Eigen::VectorXd>& g, const std::vector<double>& times,
                                           const Forcing* forcing, const HydroOptions& options) const {
  require_grid(sys_.params, g, "solve_hydrodynamic");
  require_times(times);
  return options.method == HydroMethod::rk4 ? solve_rk4(g, times, forcing, options)
                                            : solve_spectral(g, times, forcing, options);
}

DeterministicTrajectory HydroSolver::solve_spectral(const Eigen::Ref<const Eigen::VectorXd>& g,
                                                    const std::vector<double>& times, const Forcing* forcing,
                                                    const HydroOptions& options) const {
  DeterministicTrajectory traj;
  traj.params = sys_.params;
  traj.times = times;
  const Eigen::VectorXd& lambda = spec_.eigenvalues;
  Eigen::VectorXd d = q_.transpose() * (g - profile_.profile);
  traj.profiles.push_back(g);

  const GaussLegendre gl(kProductNodes);
  const Eigen::VectorXd nodes01 = 0.5 * (gl.nodes().array() + 1.0);
  std::map<long long, Eigen::MatrixXd> weight_cache;

  for (std::size_t i = 1; i < times.size(); ++i) {
    const double span = times[i] - times[i - 1];
    if (!forcing) {
      d = (-lambda.array() * span).exp().matrix().cwiseProduct(d);
    } else {
      if (!(options.substep > 0.0)) throw DomainError("substep must be positive");
      const int sub = std::max(1, static_cast<int>(std::ceil(span / options.substep - 1e-9)));
      const double h = span / sub;
      const auto key = std::llround(h * 1e15);
      auto it = weight_cache.find(key);
      if (it == weight_cache.end()) it = weight_cache.emplace(key, product_weights(lambda, h, nodes01)).first;
      const Eigen::MatrixXd& w = it->second;
      const Eigen::ArrayXd decay = (-lambda.array() * h).exp();
      for (int s = 0; s < sub; ++s) {
        const double t0 = times[i - 1] + s * h;
        Eigen::VectorXd next = decay.matrix().cwiseProduct(d);
        for (int j = 0; j < kProductNodes; ++j) {
          const Eigen::VectorXd c = q_.transpose() * (*forcing)(t0 + h * nodes01(j));
          next += w.col(j).cwiseProduct(c);
        }
        d = next;
      }
    }
    traj.profiles.push_back(profile_.profile + q_ * d);
  }
  return traj;
}

DeterministicTrajectory HydroSolver::solve_rk4(const Eigen::Ref<const Eigen::VectorXd>& g, const std::vector<double>& times,
                                               const Forcing* forcing, const HydroOptions& options) const {
  const double lambda_max = spec_.eigenvalues.maxCoeff();
  double dt = options.rk4_dt;
  if (dt == 0.0) dt = 0.05 / lambda_max;
  if (!(dt > 0.0) || dt * lambda_max >= 0.1)
    throw StabilityError("rk4 step violates dt lambda_max < 0.1 (value " + std::to_string(dt * lambda_max) + ")");

  auto rhs = [&](double t, const GridFunction& phi) {
    GridFunction r = sys_.m * phi + sys_.b;
    if (forcing) r += (*forcing)(t);
    return r;
  };
  DeterministicTrajectory traj;
  traj.params = sys_.params;
  traj.times = times;
  GridFunction phi = g;
  traj.profiles.push_back(phi);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const int steps = std::max(1, static_cast<int>(std::ceil((times[i] - times[i - 1]) / dt - 1e-9)));
    const double h = (times[i] - times[i - 1]) / steps;
    for (int s = 0; s < steps; ++s) {
      const double t = times[i - 1] + s * h;
      const GridFunction k1 = rhs(t, phi);
      const GridFunction k2 = rhs(t + 0.5 * h, phi + 0.5 * h * k1);
      const GridFunction k3 = rhs(t + 0.5 * h, phi + 0.5 * h * k2);
      const GridFunction k4 = rhs(t + h, phi + h * k3);
      phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    traj.profiles.push_back(phi);
  }
  return traj;
}

Forcing tilt_forcing(const ModelParams& params, const ExternalField& field) {
  validate_field(field);
  auto lap = std::make_shared<DiscreteLaplacian>(params);
  const int n = params.n;
  return [lap, field, n](double t) -> GridFunction { return -lap->apply(field.on_lattice(n, t)); };
}

DeterministicTrajectory solve_hydrodynamic(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g,
                                           const std::optional<ExternalField>& field, const std::vector<double>& times,
                                           HydroMethod method, HydroOptions options) {
  const HydroSolver solver(params);
  options.method = method;
  DeterministicTrajectory traj;
  if (field) {
    const Forcing f = tilt_forcing(params, *field);
    traj = solver.solve(g, times, &f, options);
  } else {
    traj = solver.solve(g, times, nullptr, options);
  }
  traj.field = field;
  return traj;
}

double weak_residual(const ModelParams& params, const DeterministicTrajectory& traj, const SpaceTimeFunction& G, double t) {
  validate_field(G);
  if (traj.times.empty() || traj.times.size() != traj.profiles.size()) throw DimensionError("weak_residual: malformed trajectory");
  if (t < traj.times.front() || t > traj.times.back() * (1.0 + 1e-12)) throw DomainError("weak_residual: t outside the trajectory");
  const int n = params.n;
  const DiscreteLaplacian lap(params);
  std::vector<double> ts, integrand;
  std::size_t last = 0;
  for (std::size_t k = 0; k < traj.times.size() && traj.times[k] <= t * (1.0 + 1e-12); ++k) {
    const double s = traj.times[k];
    const GridFunction gs = G.on_lattice(n, s);
    double v = lattice_pairing(traj.profiles[k], G.time_derivative_on_lattice(n, s) + lap.apply(gs));
    if (traj.field) v += discrete_inner_seminorm(params, traj.field->on_lattice(n, s), gs);
    ts.push_back(s);
    integrand.push_back(v);
    last = k;
  }
  const double tk = traj.times[last];
  return lattice_pairing(traj.profiles[last], G.on_lattice(n, tk)) - lattice_pairing(traj.profiles.front(), G.on_lattice(n, traj.times.front())) -
         trapezoid(ts, integrand);
}

double relaxation_rate(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g, double T) {
  return relaxation_rate(HydroSolver(params), g, T);
}

double relaxation_rate(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g, double T) {
  if (!(T > 0.0)) throw DomainError("relaxation_rate: T must be positive");
  const GridFunction& ss = solver.stationary().profile;
  require_grid(solver.params(), g, "relaxation_rate");
  if ((g - ss).norm() <= 1e-12 * (1.0 + ss.norm())) throw DomainError("relaxation_rate: initial profile is already stationary");
  constexpr int samples = 64;
  Eigen::VectorXd ts(samples), logs(samples);
  for (int i = 0; i < samples; ++i) {
    ts(i) = 0.5 * T + 0.5 * T * i / (samples - 1);
    const double dist = lattice_l2(solver.relax(g, ts(i)) - ss);
    if (!(dist > 1e-280)) throw NumericalError("relaxation_rate: distance underflows on the fit window, shorten T");
    logs(i) = std::log(dist);
  }
  const double tm = ts.mean(), lm = logs.mean();
  const double slope = ((ts.array() - tm) * (logs.array() - lm)).sum() / (ts.array() - tm).square().sum();
  return -slope;
}

std::vector<DecayRow> decay_table(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g,
                                  const std::vector<double>& times) {
  const GridFunction& ss = solver.stationary().profile;
  const double d0 = lattice_l2(g - ss);
  const double lambda1 = solver.spectrum().eigenvalues(0);
  std::vector<DecayRow> rows;
  for (double t : times) rows.push_back({t, lattice_l2(solver.relax(g, t) - ss), std::exp(-lambda1 * t) * d0});
  return rows;
}

EnergyBalance energy_balance(const HydroSolver& solver, const Eigen::Ref<const Eigen::VectorXd>& g, double t) {
  const ModelParams& p = solver.params();
  const GridFunction& ss = solver.stationary().profile;
  const GaussLegendre gl(16);
  const double lambda_max = solver.spectrum().eigenvalues.maxCoeff();
  const auto breaks = graded_breaks(0.0, t, 0.01 / lambda_max, false);
  const double scale = speed(p) / p.n;
  const double bulk = gl.integrate(
      [&](double s) { return discrete_seminorm_squared(p, solver.relax(g, s) - ss); }, breaks);
  const double boundary = gl.integrate(
      [&](double s) {
        const GridFunction psi = solver.relax(g, s) - ss;
        return scale * (psi(0) * psi(0) + psi(psi.size() - 1) * psi(psi.size() - 1));
      },
      breaks);
  const double d0 = lattice_l2(g - ss), dt = lattice_l2(solver.relax(g, t) - ss);
  return {dt * dt, d0 * d0 - 2.0 * (bulk + boundary), bulk, boundary};
}

void write_hydro_csv(std::ostream& os, const DeterministicTrajectory& traj) {
  os << "t,x,phi\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    for (Eigen::Index i = 0; i < traj.profiles[k].size(); ++i)
      os << traj.times[k] << ',' << i + 1 << ',' << traj.profiles[k](i) << '\n';
}

void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows) {
  os << "t,l2_distance,bound\n";
  os.precision(17);
  for (const auto& r : rows) os << r.t << ',' << r.l2_distance << ',' << r.bound << '\n';
}

}  // namespace fracgl
