#pragma once

#include "fracgl/params.hpp"
#include "fracgl/toeplitz.hpp"

#include <optional>
#include <vector>

namespace fracgl {

// c_gamma = 1 / (2 zeta(1 + gamma)), so that p(z) = c_gamma |z|^{-1-gamma} sums to one over Z \ {0}
double kernel_constant(double gamma);

// p(z); p(0) = 0
double jump_probability(double gamma, long z);

// sum_{|z| > radius} p(z)
double kernel_tail_mass(double gamma, long radius);

// p(k) for k = 0..count-1
Eigen::VectorXd jump_table(double gamma, int count);

// (x, y, rate): an independent driver with amplitude sqrt(rate) entering +1 at y and -1 at x.
// x == y marks a boundary reservoir driver acting on that site alone.
struct NoiseEdge {
  int x;
  int y;
  double rate;
};

struct DriftSystem {
  ModelParams params;
  Eigen::MatrixXd m;
  Eigen::VectorXd b;
  std::vector<NoiseEdge> a_edges;
  // n^gamma p(k), k = 0..n-2, zeroed beyond the truncation radius
  Eigen::VectorXd rates;
  int truncation_radius = 0;
  double truncation_bound = 0.0;

  GridFunction drift(const Eigen::Ref<const Eigen::VectorXd>& phi) const { return m * phi + b; }
  Eigen::MatrixXd diffusion_matrix() const;
  // max_x sum_{y in Lambda_n} p(y - x), without reservoir terms
  double max_row_sum() const;
};

// Full kernel when truncation_radius is empty.
DriftSystem build_drift_system(const ModelParams& params, std::optional<int> truncation_radius = std::nullopt);

// n^gamma sum_{|z| > R} p(z)
double truncation_error_bound(const ModelParams& params, int radius);

enum class LaplacianMethod { automatic, dense, fft };

GridFunction discrete_fractional_laplacian(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g,
                                           LaplacianMethod method = LaplacianMethod::automatic);

// Reusable operator for repeated application at fixed (n, gamma).
class DiscreteLaplacian {
 public:
  explicit DiscreteLaplacian(const ModelParams& params);
  GridFunction apply(const Eigen::Ref<const Eigen::VectorXd>& g, LaplacianMethod method = LaplacianMethod::automatic) const;
  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
  SymmetricToeplitz toeplitz_;
  Eigen::VectorXd row_sums_;
};

// (n^gamma / 2n) sum_{x,y} p(y-x) (f_y - f_x)(g_y - g_x)
double discrete_inner_seminorm(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& f,
                               const Eigen::Ref<const Eigen::VectorXd>& g);

inline double discrete_seminorm_squared(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& f) {
  return discrete_inner_seminorm(params, f, f);
}

// (1/n) f^T (-M) f: the seminorm plus the reservoir terms n^{gamma-1} (f(1)^2 + f(n-1)^2)
double dirichlet_energy(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& f);

}  // namespace fracgl
