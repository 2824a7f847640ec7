#include "fracgl/kernel.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fracgl {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw DomainError("gamma must lie in (1,2), got " + std::to_string(gamma));
}

// sum_{z=1..R} z^{-s}
double partial_zeta(double s, long radius) {
  double acc = 0.0;
  for (long z = radius; z >= 1; --z) acc += std::pow(static_cast<double>(z), -s);
  return acc;
}

}  // namespace

double kernel_constant(double gamma) {
  require_gamma(gamma);
  static std::mutex mutex;
  static std::map<double, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(gamma); it != cache.end()) return it->second;
  const double c = 0.5 / std::riemann_zeta(1.0 + gamma);
  cache.emplace(gamma, c);
  return c;
}

double jump_probability(double gamma, long z) {
  if (z == 0) return 0.0;
  return kernel_constant(gamma) * std::pow(std::fabs(static_cast<double>(z)), -1.0 - gamma);
}

double kernel_tail_mass(double gamma, long radius) {
  require_gamma(gamma);
  if (radius < 0) return 1.0;
  const double s = 1.0 + gamma;
  const double tail = std::riemann_zeta(s) - partial_zeta(s, radius);
  return std::max(0.0, 2.0 * kernel_constant(gamma) * tail);
}

Eigen::VectorXd jump_table(double gamma, int count) {
  const double c = kernel_constant(gamma);
  Eigen::VectorXd p(count);
  for (int k = 0; k < count; ++k) p(k) = k == 0 ? 0.0 : c * std::pow(static_cast<double>(k), -1.0 - gamma);
  return p;
}

Eigen::MatrixXd DriftSystem::diffusion_matrix() const {
  const int size = params.n - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size, size);
  for (const auto& e : a_edges) {
    const int i = e.x - 1, j = e.y - 1;
    if (i == j) {
      a(i, i) += e.rate;
    } else {
      a(i, i) += e.rate;
      a(j, j) += e.rate;
      a(i, j) -= e.rate;
      a(j, i) -= e.rate;
    }
  }
  return a;
}

double DriftSystem::max_row_sum() const {
  const double s = speed(params);
  const int size = params.n - 1;
  double best = 0.0;
  for (int i = 0; i < size; ++i) {
    double r = 0.0;
    for (int j = 0; j < size; ++j) r += rates(std::abs(i - j));
    best = std::max(best, r / s);
  }
  return best;
}

DriftSystem build_drift_system(const ModelParams& params, std::optional<int> truncation_radius) {
  validate(params);
  const int n = params.n;
  const int size = n - 1;
  const double s = speed(params);
  const int radius = truncation_radius ? *truncation_radius : n - 2;
  if (radius < 1) throw DomainError("truncation radius must be at least 1");

  DriftSystem sys;
  sys.params = params;
  sys.truncation_radius = std::min(radius, n - 2);
  sys.truncation_bound = truncation_radius ? truncation_error_bound(params, radius) : 0.0;
  sys.rates = s * jump_table(params.gamma, size);
  for (int k = sys.truncation_radius + 1; k < size; ++k) sys.rates(k) = 0.0;

  sys.m = Eigen::MatrixXd::Zero(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (i != j) sys.m(i, j) = sys.rates(std::abs(i - j));
  for (int i = 0; i < size; ++i) sys.m(i, i) = -sys.m.row(i).sum();
  sys.m(0, 0) -= s;
  sys.m(size - 1, size - 1) -= s;

  sys.b = Eigen::VectorXd::Zero(size);
  sys.b(0) += s * params.phi_l;
  sys.b(size - 1) += s * params.phi_r;

  sys.a_edges.reserve(static_cast<std::size_t>(size) * (size - 1) / 2 + 2);
  for (int x = 1; x <= size; ++x)
    for (int y = x + 1; y <= std::min(size, x + sys.truncation_radius); ++y)
      sys.a_edges.push_back({x, y, 2.0 * sys.rates(y - x)});
  sys.a_edges.push_back({1, 1, 2.0 * s});
  sys.a_edges.push_back({size, size, 2.0 * s});
  return sys;
}

double truncation_error_bound(const ModelParams& params, int radius) {
  validate(params);
  return speed(params) * kernel_tail_mass(params.gamma, radius);
}

DiscreteLaplacian::DiscreteLaplacian(const ModelParams& params)
    : params_((validate(params), params)), toeplitz_(speed(params) * jump_table(params.gamma, params.n - 1)) {
  row_sums_ = toeplitz_.row_sums();
}

GridFunction DiscreteLaplacian::apply(const Eigen::Ref<const Eigen::VectorXd>& g, LaplacianMethod method) const {
  require_grid(params_, g, "discrete_fractional_laplacian");
  if (method == LaplacianMethod::automatic) method = params_.n > 256 ? LaplacianMethod::fft : LaplacianMethod::dense;
  if (method == LaplacianMethod::fft) return toeplitz_.apply(g) - row_sums_.cwiseProduct(g);
  const auto& t = toeplitz_.column();
  const Eigen::Index size = g.size();
  GridFunction out(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < size; ++j) acc += t(std::abs(i - j)) * (g(j) - g(i));
    out(i) = acc;
  }
  return out;
}

GridFunction discrete_fractional_laplacian(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g,
                                           LaplacianMethod method) {
  return DiscreteLaplacian(params).apply(g, method);
}

double discrete_inner_seminorm(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& f,
                               const Eigen::Ref<const Eigen::VectorXd>& g) {
  validate(params);
  require_grid(params, f, "discrete_inner_seminorm");
  require_grid(params, g, "discrete_inner_seminorm");
  const Eigen::VectorXd p = jump_table(params.gamma, params.n - 1);
  const Eigen::Index size = f.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < size; ++i)
    for (Eigen::Index j = i + 1; j < size; ++j) acc += p(j - i) * (f(j) - f(i)) * (g(j) - g(i));
  // the double sum counts each unordered pair twice
  return speed(params) * acc / params.n;
}

double dirichlet_energy(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& f) {
  const double bulk = discrete_seminorm_squared(params, f);
  return bulk + speed(params) / params.n * (f(0) * f(0) + f(f.size() - 1) * f(f.size() - 1));
}

}  // namespace fracgl
