#pragma once

#include "fracgl/params.hpp"

#include <functional>
#include <iosfwd>
#include <optional>

namespace fracgl {

struct Support {
  double a;
  double b;
};

// Function on [0,1] with first and second derivatives.
struct TestFunction {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::optional<Support> support;

  double operator()(double u) const { return f(u); }
  GridFunction on_lattice(int n) const { return sample_on_lattice(n, f); }
};

// ((u-a)(b-u) / ((b-a)/2)^2)^power on [a,b], zero outside; C^{power-1}.
TestFunction polynomial_bump(double a, double b, int power = 4);
TestFunction sine_mode(int k);
TestFunction constant_function(double c);
TestFunction scaled(const TestFunction& f, double s);

struct QuadratureOptions {
  int points = 20;       // Gauss-Legendre nodes per panel
  int panels = 4;        // panels per smooth piece
  double h_cut = 1e-5;   // below this the F''(u) |h|^{1-gamma} expansion is integrated analytically
};

// Regional fractional Laplacian of F at u from the Taylor-regularized form
//   c ∫ [F(v) - F(u) - F'(u)(v-u)] |v-u|^{-1-gamma} dv - F'(u) c/(gamma-1) [(1-u)^{1-gamma} - u^{1-gamma}].
double regional_laplacian_pointwise(double gamma, const TestFunction& F, double u, const QuadratureOptions& q = {});

// (c/2) ∬ (F(v)-F(u))(G(v)-G(u)) |u-v|^{-1-gamma} du dv
double continuum_seminorm(double gamma, const TestFunction& F, const TestFunction& G, const QuadratureOptions& q = {});

// ∫ F (-L G) on [0,1]
double continuum_laplacian_pairing(double gamma, const TestFunction& F, const TestFunction& G,
                                   const QuadratureOptions& q = {});

// max over lattice points of |(L_n F)(x/n) - (L F)(x/n)|
double laplacian_sup_gap(const ModelParams& params, const TestFunction& F, const QuadratureOptions& q = {});

struct SpectralData {
  int n = 0;
  double gamma = 0.0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // column k is e_{k+1}, orthonormal under (1/n) sum
  double max_residual = 0.0;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  // <f, e_k> for every retained mode
  Eigen::VectorXd coefficients(const Eigen::Ref<const Eigen::VectorXd>& f) const;
  GridFunction synthesize(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;
  // ||f - P f||^2 under the (1/n) inner product
  double projection_residual(const Eigen::Ref<const Eigen::VectorXd>& f) const;
};

// k_max smallest eigenpairs of -M (M is reservoir independent).
SpectralData dirichlet_spectrum(const ModelParams& params, int k_max);

// sum_k lambda_k^{-1} <t, e_k> e_k; ResidualError when the relative residual energy of t outside the
// retained modes exceeds tol.
GridFunction inverse_dirichlet_apply(const SpectralData& spec, const Eigen::Ref<const Eigen::VectorXd>& t,
                                     double tol = 1e-8);

void write_spectrum_csv(std::ostream& os, const SpectralData& spec);

}  // namespace fracgl
