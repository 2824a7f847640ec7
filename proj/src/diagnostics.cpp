#include "fracgl/diagnostics.hpp"

#include <cmath>

namespace fracgl {

namespace {

constexpr int kMaxLattice = 16;

}  // namespace

PolyBasis::PolyBasis(int sites) : sites_(sites), pair_index_(static_cast<std::size_t>(sites * sites), -1) {
  for (int i = 0; i < sites; ++i)
    for (int j = i; j < sites; ++j) {
      pair_index_[static_cast<std::size_t>(i * sites + j)] = 1 + sites + static_cast<int>(pairs_.size());
      pairs_.emplace_back(i, j);
    }
}

int PolyBasis::quadratic(int i, int j) const {
  if (i > j) std::swap(i, j);
  return pair_index_[static_cast<std::size_t>(i * sites_ + j)];
}

double PolyBasis::evaluate(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Eigen::Ref<const Eigen::VectorXd>& phibar) const {
  double v = coeffs(0);
  for (int i = 0; i < sites_; ++i) v += coeffs(linear(i)) * phibar(i);
  for (const auto& [i, j] : pairs_) v += coeffs(quadratic(i, j)) * phibar(i) * phibar(j);
  return v;
}

Eigen::MatrixXd generator_matrix_poly2(const ModelParams& params, const StationaryProfile& profile) {
  validate(params);
  if (params.n > kMaxLattice) throw DomainError("generator_matrix_poly2: n must not exceed 16");
  require_grid(params, profile.profile, "generator_matrix_poly2");
  const DriftSystem sys = build_drift_system(params);
  const Eigen::MatrixXd& m = sys.m;
  const Eigen::MatrixXd a = sys.diffusion_matrix();
  const int size = params.n - 1;
  const PolyBasis basis(size);
  // in centered coordinates the drift is M phibar, since M Phi_ss + b = 0
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int x = 0; x < size; ++x)
    for (int z = 0; z < size; ++z) l(basis.linear(z), basis.linear(x)) += m(x, z);
  // L(phibar_x phibar_y) = phibar_y (M phibar)_x + phibar_x (M phibar)_y + a_xy
  for (const auto& [x, y] : basis.pairs()) {
    const int col = basis.quadratic(x, y);
    for (int z = 0; z < size; ++z) {
      l(basis.quadratic(y, z), col) += m(x, z);
      l(basis.quadratic(x, z), col) += m(y, z);
    }
    l(PolyBasis::constant(), col) += a(x, y);
  }
  return l;
}

Eigen::MatrixXd gram_matrix_poly2(const PolyBasis& basis) {
  const int size = basis.size();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
  auto delta = [](int i, int j) { return i == j ? 1.0 : 0.0; };
  g(0, 0) = 1.0;
  for (int i = 0; i < basis.sites(); ++i) g(basis.linear(i), basis.linear(i)) = 1.0;
  for (const auto& [i, j] : basis.pairs()) {
    const int r = basis.quadratic(i, j);
    g(0, r) = g(r, 0) = delta(i, j);
    for (const auto& [k, l] : basis.pairs())
      g(r, basis.quadratic(k, l)) = delta(i, j) * delta(k, l) + delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k);
  }
  return g;
}

AdjointReport adjoint_defect(const ModelParams& params, const StationaryProfile& profile) {
  AdjointReport r;
  r.l = generator_matrix_poly2(params, profile);
  const PolyBasis basis(params.n - 1);
  r.gram = gram_matrix_poly2(basis);
  Eigen::LLT<Eigen::MatrixXd> llt(r.gram);
  if (llt.info() != Eigen::Success) throw NumericalError("adjoint_defect: Gram matrix is not positive definite");
  r.l_star = llt.solve(r.l.transpose() * r.gram);

  Eigen::VectorXd one = Eigen::VectorXd::Zero(basis.size());
  one(0) = 1.0;
  r.invariance_residual = (r.l_star * one).cwiseAbs().maxCoeff();

  // Gram = R^T R maps the NESS inner product to the Euclidean one; P removes the mean.
  const Eigen::MatrixXd upper = llt.matrixU();
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(basis.size(), basis.size()) - one * (r.gram * one).transpose();
  const Eigen::MatrixXd antisym = 0.5 * (r.l - r.l_star);
  const Eigen::MatrixXd conj = upper * antisym * proj * upper.triangularView<Eigen::Upper>().solve(
                                                            Eigen::MatrixXd::Identity(basis.size(), basis.size()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(conj);
  r.defect_norm = svd.singularValues()(0);
  return r;
}

double dirichlet_form_linear(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& c) {
  validate(params);
  require_grid(params, c, "dirichlet_form_linear");
  const Eigen::VectorXd p = jump_table(params.gamma, params.n - 1);
  double bulk = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    for (Eigen::Index j = 0; j < c.size(); ++j) bulk += p(std::abs(i - j)) * (c(j) - c(i)) * (c(j) - c(i));
  return speed(params) * (c(0) * c(0) + c(c.size() - 1) * c(c.size() - 1) + 0.5 * bulk);
}

}  // namespace fracgl
