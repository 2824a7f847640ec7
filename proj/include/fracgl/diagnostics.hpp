#pragma once

#include "fracgl/ness.hpp"

#include <utility>
#include <vector>

namespace fracgl {

// {1} ∪ {phibar(x)} ∪ {phibar(x) phibar(y), x <= y}, phibar = phi - Phi_ss
class PolyBasis {
 public:
  explicit PolyBasis(int sites);

  int sites() const { return sites_; }
  int size() const { return 1 + sites_ + static_cast<int>(pairs_.size()); }
  static int constant() { return 0; }
  int linear(int i) const { return 1 + i; }  // 0-based site index
  int quadratic(int i, int j) const;
  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }

  // value of sum_j coeffs(j) b_j at the centered configuration
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Eigen::Ref<const Eigen::VectorXd>& phibar) const;

 private:
  int sites_;
  std::vector<std::pair<int, int>> pairs_;
  std::vector<int> pair_index_;
};

// Column j holds the coefficients of L_n b_j.
Eigen::MatrixXd generator_matrix_poly2(const ModelParams& params, const StationaryProfile& profile);

// E[b_i b_j] under the product Gaussian NESS (Wick's theorem).
Eigen::MatrixXd gram_matrix_poly2(const PolyBasis& basis);

struct AdjointReport {
  Eigen::MatrixXd l;
  Eigen::MatrixXd l_star;  // Gram^{-1} L^T Gram
  Eigen::MatrixXd gram;
  double defect_norm = 0.0;          // ||(L - L*)/2|| in the NESS norm on mean-zero observables
  double invariance_residual = 0.0;  // max |L* 1|
};

AdjointReport adjoint_defect(const ModelParams& params, const StationaryProfile& profile);

// <f, -L_n f> for f = sum_x c_x phi(x): n^gamma [c_1^2 + c_{n-1}^2 + (1/2) sum_{x,y} p(y-x)(c_y - c_x)^2]
double dirichlet_form_linear(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& c);

}  // namespace fracgl
