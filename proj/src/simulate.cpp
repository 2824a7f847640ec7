#include "fracgl/simulate.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace fracgl {

void check_euler_stability(const DriftSystem& sys, double dt) {
  if (!(dt > 0.0)) throw StabilityError("time step must be positive");
  const double load = dt * speed(sys.params) * (1.0 + sys.max_row_sum());
  if (!(load < 0.5)) {
    std::ostringstream os;
    os << "Euler step dt=" << dt << " violates dt n^gamma (1 + max row sum) < 0.5 (value " << load << ")";
    throw StabilityError(os.str());
  }
}

EulerStepper::EulerStepper(const DriftSystem& sys, double dt, NoiseModel noise) : sys_(&sys), dt_(dt), noise_(noise) {
  check_euler_stability(sys, dt);
  if (noise_ == NoiseModel::factored) {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.diffusion_matrix() * dt);
    if (llt.info() != Eigen::Success) throw NumericalError("diffusion matrix is not positive definite");
    chol_ = llt.matrixL();
  } else {
    edge_scale_.reserve(sys.a_edges.size());
    for (const auto& e : sys.a_edges) edge_scale_.push_back(std::sqrt(e.rate * dt));
  }
}

void EulerStepper::advance_deterministic(GridFunction& phi, const TiltInput* tilt) const {
  GridFunction drift = sys_->m * phi + sys_->b;
  if (tilt && tilt->laplacian) drift -= *tilt->laplacian;
  phi += dt_ * drift;
}

void EulerStepper::advance(GridFunction& phi, Rng& rng, const TiltInput* tilt, FieldMode mode, KahanSum* log_weight) const {
  GridFunction next = phi;
  GridFunction drift = sys_->m * phi + sys_->b;
  if (tilt && tilt->laplacian && mode == FieldMode::tilt) drift -= *tilt->laplacian;
  next += dt_ * drift;

  const GridFunction* h = (log_weight && tilt) ? tilt->h : nullptr;
  double beta_dw = 0.0, beta_sq = 0.0;
  if (noise_ == NoiseModel::edges) {
    const auto& edges = sys_->a_edges;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto& e = edges[i];
      const double w = edge_scale_[i] * rng.normal();
      const int x = e.x - 1, y = e.y - 1;
      if (x == y) {
        next(x) += w;
        continue;
      }
      next(y) += w;
      next(x) -= w;
      if (h) {
        const double dh = (*h)(y) - (*h)(x);
        beta_dw += 0.5 * dh * w;
        beta_sq += 0.25 * e.rate * dh * dh;
      }
    }
  } else {
    GridFunction xi(phi.size());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = rng.normal();
    const GridFunction noise = chol_.triangularView<Eigen::Lower>() * xi;
    next += noise;
    if (h) {
      beta_dw = 0.5 * h->dot(noise);
      beta_sq = -0.5 * h->dot(*tilt->laplacian);
    }
  }
  if (h) log_weight->add(beta_dw + (mode == FieldMode::tilt ? 0.5 : -0.5) * beta_sq * dt_);
  phi.swap(next);
}

FieldState step_euler(const FieldState& state, const DriftSystem& sys, const LatticeField* field, int step_index,
                      double dt, Rng& rng) {
  require_grid(sys.params, state.phi, "step_euler");
  const EulerStepper stepper(sys, dt);
  TiltInput tilt;
  if (field) tilt = {&field->values(step_index), &field->laplacian(step_index)};
  FieldState out = state;
  stepper.advance(out.phi, rng, field ? &tilt : nullptr);
  out.time += dt;
  return out;
}

ExactPropagator::ExactPropagator(const DriftSystem& sys, const StationaryProfile& profile)
    : stationary_(profile.profile) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sys.m);
  if (solver.info() != Eigen::Success) throw NumericalError("ExactPropagator: eigensolver failed");
  q_ = solver.eigenvectors();
  rates_ = solver.eigenvalues();
}

GridFunction ExactPropagator::mean(const Eigen::Ref<const Eigen::VectorXd>& phi, double t) const {
  const Eigen::VectorXd d = q_.transpose() * (phi - stationary_);
  return stationary_ + q_ * (rates_.array() * t).exp().matrix().cwiseProduct(d);
}

GridFunction ExactPropagator::propagate(const Eigen::Ref<const Eigen::VectorXd>& phi, double t, Rng& rng) const {
  if (t < 0.0) throw DomainError("ExactPropagator: negative time");
  if (t == 0.0) return phi;
  Eigen::VectorXd d = q_.transpose() * (phi - stationary_);
  for (Eigen::Index k = 0; k < d.size(); ++k) {
    const double r = rates_(k) * t;
    d(k) = std::exp(r) * d(k) + std::sqrt(-std::expm1(2.0 * r)) * rng.normal();
  }
  return stationary_ + q_ * d;
}

FieldState propagate_exact(const FieldState& state, const DriftSystem& sys, const StationaryProfile& profile, double t,
                           Rng& rng) {
  require_grid(sys.params, state.phi, "propagate_exact");
  const ExactPropagator prop(sys, profile);
  return {prop.propagate(state.phi, t, rng), state.time + t};
}

Simulator::Simulator(const DriftSystem& sys, const StationaryProfile& profile, double T, SimulationOptions options)
    : sys_(&sys), options_(std::move(options)) {
  if (T < 0.0) throw DomainError("simulation horizon must be non-negative");
  if (!(options_.dt > 0.0)) throw DomainError("time step must be positive");
  if (options_.record_every < 1) throw DomainError("record_every must be at least 1");
  steps_ = static_cast<int>(std::ceil(T / options_.dt - 1e-9));
  dt_ = steps_ > 0 ? T / steps_ : options_.dt;
  if (options_.scheme == Scheme::exact) {
    if (options_.field) throw UnsupportedError("exact propagation supports the untilted dynamics only");
    exact_ = std::make_unique<ExactPropagator>(sys, profile);
    return;
  }
  euler_ = std::make_unique<EulerStepper>(sys, dt_, options_.noise);
  if (options_.field) {
    field_ = std::make_unique<LatticeField>(*options_.field, sys.params, dt_, steps_);
    if (options_.noise == NoiseModel::factored && !field_->clear_of_boundary_sites())
      throw DomainError("factored noise needs the field to vanish at sites 1 and n-1");
  }
}

template <class Visit>
double Simulator::evolve(GridFunction& phi, Rng& rng, Visit&& visit) const {
  KahanSum log_weight;
  for (int k = 0; k < steps_; ++k) {
    if (exact_) {
      phi = exact_->propagate(phi, dt_, rng);
    } else if (field_) {
      const TiltInput tilt{&field_->values(k), &field_->laplacian(k)};
      euler_->advance(phi, rng, &tilt, options_.field_mode, &log_weight);
    } else {
      euler_->advance(phi, rng);
    }
    visit(k + 1, phi);
  }
  return log_weight.value();
}

Trajectory Simulator::run(const FieldState& init, Rng& rng) const {
  require_grid(sys_->params, init.phi, "simulate_trajectory");
  Trajectory traj;
  traj.scheme = options_.scheme;
  traj.dt = dt_;
  traj.record_every = options_.record_every;
  traj.times.push_back(init.time);
  traj.states.push_back(init);
  GridFunction phi = init.phi;
  const double lw = evolve(phi, rng, [&](int k, const GridFunction& p) {
    if (k % options_.record_every == 0 || k == steps_) {
      traj.times.push_back(init.time + k * dt_);
      traj.states.push_back({p, init.time + k * dt_});
    }
  });
  if (field_) traj.log_girsanov = lw;
  return traj;
}

FieldState Simulator::run_terminal(const FieldState& init, Rng& rng, double* log_weight) const {
  require_grid(sys_->params, init.phi, "simulate_trajectory");
  GridFunction phi = init.phi;
  const double lw = evolve(phi, rng, [](int, const GridFunction&) {});
  if (log_weight) *log_weight = lw;
  return {phi, init.time + steps_ * dt_};
}

Trajectory simulate_trajectory(const DriftSystem& sys, const StationaryProfile& profile, const FieldState& init, double T,
                               const SimulationOptions& options, std::uint64_t seed, std::uint64_t replica) {
  const Simulator sim(sys, profile, T, options);
  Rng rng(seed, replica);
  return sim.run(init, rng);
}

double empirical_pairing(const FieldState& state, const Eigen::Ref<const Eigen::VectorXd>& G) {
  if (G.size() != state.phi.size()) throw DimensionError("empirical_pairing: size mismatch");
  return G.dot(state.phi) / static_cast<double>(state.phi.size());
}

double boundary_block_average(const FieldState& state, Side side, double eps) {
  const auto size = static_cast<int>(state.phi.size());
  const int n = size + 1;
  const int block = static_cast<int>(std::floor(eps * n));
  if (block < 1 || block > n - 2) throw DomainError("boundary_block_average: need 1 <= floor(eps n) <= n-2");
  return side == Side::left ? state.phi.head(block).mean() : state.phi.tail(block).mean();
}

DynkinSample dynkin_martingale(const DriftSystem& sys, const Trajectory& traj, const Eigen::Ref<const Eigen::VectorXd>& G,
                               const LatticeField* field) {
  require_grid(sys.params, G, "dynkin_martingale");
  if (traj.record_every != 1) throw DomainError("dynkin_martingale: trajectory must be recorded at every step");
  if (field && traj.scheme != Scheme::euler) throw UnsupportedError("dynkin_martingale: tilted paths come from Euler runs");
  const double norm = static_cast<double>(sys.params.n - 1);
  const std::size_t steps = traj.states.size() - 1;
  std::vector<double> pairing(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    GridFunction drift = sys.m * traj.states[k].phi + sys.b;
    if (field && k < steps) drift -= field->laplacian(static_cast<int>(k));
    pairing[k] = G.dot(drift) / norm;
  }
  KahanSum integral;
  for (std::size_t k = 0; k < steps; ++k) {
    const double dt = traj.times[k + 1] - traj.times[k];
    // left point for Euler paths, so the martingale is exactly the sum of noise increments
    integral.add(traj.scheme == Scheme::euler ? dt * pairing[k] : 0.5 * dt * (pairing[k] + pairing[k + 1]));
  }
  DynkinSample out;
  out.martingale = (G.dot(traj.states.back().phi) - G.dot(traj.states.front().phi)) / norm - integral.value();

  const Eigen::VectorXd p = jump_table(sys.params.gamma, sys.params.n - 1);
  double bulk = 0.0;
  for (Eigen::Index i = 0; i < G.size(); ++i)
    for (Eigen::Index j = 0; j < G.size(); ++j) bulk += p(std::abs(i - j)) * (G(j) - G(i)) * (G(j) - G(i));
  const double rate = speed(sys.params) / (norm * norm) * (bulk + 2.0 * (G(0) * G(0) + G(G.size() - 1) * G(G.size() - 1)));
  out.predicted_qv = rate * (traj.times.back() - traj.times.front());
  return out;
}

DynkinReport dynkin_diagnostics(const std::vector<DynkinSample>& samples) {
  if (samples.size() < 2) throw DomainError("dynkin_diagnostics: need at least two replicas");
  std::vector<double> m;
  m.reserve(samples.size());
  double qv = 0.0;
  for (const auto& s : samples) {
    m.push_back(s.martingale);
    qv += s.predicted_qv;
  }
  DynkinReport r;
  r.replicas = static_cast<long>(samples.size());
  const auto mean = mean_estimate(m);
  const auto var = variance_estimate(m);
  r.mean = mean.value;
  r.mean_stderr = mean.stderr_;
  r.variance = var.value;
  r.variance_stderr = var.stderr_;
  r.predicted_qv = qv / static_cast<double>(samples.size());
  return r;
}

void for_each_replica(long count, const std::function<void(long)>& fn, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count < 2) {
    for (long r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        try {
          for (long r = next++; r < count; r = next++) fn(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,phi\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    for (Eigen::Index i = 0; i < traj.states[k].phi.size(); ++i)
      os << traj.times[k] << ',' << i + 1 << ',' << traj.states[k].phi(i) << '\n';
}

}  // namespace fracgl
