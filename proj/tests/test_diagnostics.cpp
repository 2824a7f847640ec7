#include <doctest.h>

#include "fracgl/diagnostics.hpp"
#include "fracgl/simulate.hpp"
#include "fracgl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

using namespace fracgl;

namespace {

Eigen::VectorXd random_coeffs(int size, Rng& rng) {
  Eigen::VectorXd c(size);
  for (int i = 0; i < size; ++i) c(i) = rng.normal();
  return c;
}

}  // namespace

TEST_SUITE("diagnostics") {
  TEST_CASE("basis indexing") {
    const PolyBasis b(7);
    CHECK(b.size() == 1 + 7 + 28);
    CHECK(b.linear(0) == 1);
    CHECK(b.quadratic(2, 5) == b.quadratic(5, 2));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size());
    c(PolyBasis::constant()) = 2.0;
    c(b.linear(3)) = -1.0;
    c(b.quadratic(1, 4)) = 0.5;
    const Eigen::VectorXd phibar = Eigen::VectorXd::LinSpaced(7, 1.0, 7.0);
    CHECK(b.evaluate(c, phibar) == doctest::Approx(2.0 - 4.0 + 0.5 * 2.0 * 5.0));
  }

  TEST_CASE("generator annihilates constants and reproduces the drift") {
    const ModelParams p{8, 1.5, 0.0, 1.0};
    const StationaryProfile s = solve_stationary_profile(p);
    const DriftSystem sys = build_drift_system(p);
    const Eigen::MatrixXd L = generator_matrix_poly2(p, s);
    const PolyBasis b(7);
    CHECK(L.col(PolyBasis::constant()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 7; ++i) {
      const Eigen::VectorXd col = L.col(b.linear(i));
      CHECK(col(PolyBasis::constant()) == 0.0);
      for (int j = 0; j < 7; ++j) CHECK(col(b.linear(j)) == doctest::Approx(sys.m(i, j)).epsilon(1e-14));
    }
    // L(phibar_i phibar_j) has constant part a_ij
    const Eigen::MatrixXd a = sys.diffusion_matrix();
    for (int i = 0; i < 7; ++i)
      for (int j = i; j < 7; ++j)
        CHECK(L(PolyBasis::constant(), b.quadratic(i, j)) == doctest::Approx(a(i, j)).epsilon(1e-12));
    CHECK_THROWS_AS(generator_matrix_poly2({17, 1.5, 0, 1}, solve_stationary_profile(ModelParams{17, 1.5, 0, 1})),
                    DomainError);
  }

  TEST_CASE("generator matrix against a Monte Carlo time derivative") {
    const ModelParams p{6, 1.5, 0.0, 1.0};
    const StationaryProfile s = solve_stationary_profile(p);
    const DriftSystem sys = build_drift_system(p);
    const Eigen::MatrixXd L = generator_matrix_poly2(p, s);
    const PolyBasis b(5);
    const double dt = 1e-6;
    const EulerStepper stepper(sys, dt);
    Rng coeff_rng(404, 0);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd f = random_coeffs(b.size(), coeff_rng);
      const Eigen::VectorXd phi0 = s.profile + random_coeffs(5, coeff_rng);
      const Eigen::VectorXd bar0 = phi0 - s.profile;
      const double exact = b.evaluate(L * f, bar0);
      const double f0 = b.evaluate(f, bar0);
      const GridFunction mean_step = phi0 + dt * sys.drift(phi0);
      const int count = 20000;
      std::vector<double> est(count);
      for (int r = 0; r < count; ++r) {
        Rng rng(500 + trial, static_cast<std::uint64_t>(r));
        GridFunction up = phi0;
        stepper.advance(up, rng);
        const GridFunction down = 2.0 * mean_step - up;
        est[r] = (0.5 * (b.evaluate(f, up - s.profile) + b.evaluate(f, down - s.profile)) - f0) / dt;
      }
      const Estimate e = mean_estimate(est);
      CHECK(std::abs(e.value - exact) < 3.0 * e.stderr_ + 1e-3 * std::abs(exact));
    }
  }

  TEST_CASE("adjoint: invariance, reversibility, symmetric part") {
    for (auto [l, r] : {std::pair{0.0, 1.0}, std::pair{1.5, 1.5}, std::pair{-2.0, 3.0}}) {
      const ModelParams p{8, 1.5, l, r};
      const StationaryProfile s = solve_stationary_profile(p);
      const AdjointReport rep = adjoint_defect(p, s);
      CHECK(rep.invariance_residual < 1e-10);
      MESSAGE("adjoint defect at (" << l << ", " << r << "): " << rep.defect_norm);
      CHECK(rep.defect_norm < 1e-8 * rep.l.cwiseAbs().maxCoeff());

      const Eigen::MatrixXd S = 0.5 * (rep.l + rep.l_star);
      Rng rng(6, 0);
      for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd f = random_coeffs(static_cast<int>(rep.l.rows()), rng);
        const Eigen::VectorXd g = random_coeffs(static_cast<int>(rep.l.rows()), rng);
        const double lhs = f.dot(rep.gram * (-rep.l * g)) + g.dot(rep.gram * (-rep.l * f));
        const double rhs = 2.0 * f.dot(rep.gram * (-S * g));
        CHECK(std::abs(lhs - rhs) < 1e-10 * std::max(1.0, std::abs(lhs)));
        CHECK(f.dot(rep.gram * (-rep.l * f)) >= -1e-9);
      }
      for (int j = 0; j < rep.l.cols(); ++j) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(rep.l.cols(), j);
        CHECK(e.dot(rep.gram * (-rep.l * e)) >= -1e-9);
      }
    }
  }

  TEST_CASE("Gram matrix matches Gaussian moments") {
    const PolyBasis b(3);
    const Eigen::MatrixXd G = gram_matrix_poly2(b);
    CHECK(G(0, 0) == 1.0);
    CHECK(G(b.linear(1), b.linear(1)) == 1.0);
    CHECK(G(b.linear(0), b.linear(1)) == 0.0);
    CHECK(G(0, b.quadratic(1, 1)) == 1.0);
    CHECK(G(b.quadratic(1, 1), b.quadratic(1, 1)) == 3.0);
    CHECK(G(b.quadratic(0, 1), b.quadratic(0, 1)) == 1.0);
    CHECK(G(b.quadratic(0, 0), b.quadratic(1, 1)) == 1.0);
  }

  TEST_CASE("Dirichlet form of linear observables") {
    const ModelParams p{8, 1.5, 0.0, 1.0};
    CHECK(dirichlet_form_linear(p, GridFunction::Zero(7)) == 0.0);
    CHECK(dirichlet_form_linear(p, GridFunction::Constant(7, 0.5)) == doctest::Approx(speed(p) * 2.0 * 0.25));
    const DriftSystem sys = build_drift_system(p);
    const GridFunction c = GridFunction::LinSpaced(7, -1.0, 2.0).array().square();
    CHECK(dirichlet_form_linear(p, c) == doctest::Approx(-c.dot(sys.m * c)).epsilon(1e-12));

    // <f, -L f> under the NESS by sampling
    const StationaryProfile s = solve_stationary_profile(sys);
    const int count = 100000;
    const auto draws = sample_ness(p, s, count, 88);
    std::vector<double> v(count);
    for (int r = 0; r < count; ++r) {
      const GridFunction& phi = draws[r].phi;
      v[r] = -c.dot(phi) * c.dot(sys.drift(phi));
    }
    const Estimate e = mean_estimate(v);
    CHECK(std::abs(e.value - dirichlet_form_linear(p, c)) < 3.0 * e.stderr_);
  }
}
