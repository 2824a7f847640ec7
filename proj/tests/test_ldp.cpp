#include <doctest.h>

#include "fracgl/ldp.hpp"
#include "fracgl/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace fracgl;

namespace {

std::vector<double> grid(double T, int steps) {
  std::vector<double> t(steps + 1);
  for (int k = 0; k <= steps; ++k) t[k] = T * k / steps;
  return t;
}

ExternalField wobbling_bump(double a, double b, double amp, double freq) {
  return separable_field(polynomial_bump(a, b, 4), [=](double t) { return amp * (1.0 + 0.5 * std::sin(freq * t)); },
                         [=](double t) { return amp * 0.5 * freq * std::cos(freq * t); });
}

// Phi_ss plus a smooth perturbation vanishing at both ends
GridFunction target(int n, const StationaryProfile& s, double amp, int k) {
  return s.profile + sample_on_lattice(n, [=](double u) { return amp * std::pow(std::sin(std::numbers::pi * u), 2) * std::cos(k * u); });
}

}  // namespace

TEST_SUITE("ldp") {
  TEST_CASE("J functional: zero field, maximizer at H/2, variational bound") {
    const ModelParams p{64, 1.5, 0.0, 1.0};
    const double T = 0.5;
    const ExternalField H = wobbling_bump(0.25, 0.75, 1.5, 4.0);
    const GridFunction g = solve_stationary_profile(p).profile +
                           sample_on_lattice(64, [](double u) { return 0.3 * std::sin(std::numbers::pi * u); });
    const DeterministicTrajectory traj = solve_hydrodynamic(p, g, H, grid(T, 1000));
    CHECK(j_functional(p, traj, g, scaled(H, 0.0)) == 0.0);

    const double rate = rate_from_field(p, H, T);
    const double at_half = j_functional(p, traj, g, scaled(H, 0.5));
    CHECK(at_half == doctest::Approx(rate).epsilon(1e-5));

    Rng rng(99, 0);
    for (int i = 0; i < 50; ++i) {
      const double a = 0.05 + 0.4 * rng.uniform();
      const double b = a + 0.1 + (0.9 - a - 0.1) * rng.uniform();
      const ExternalField G = wobbling_bump(a, b, 2.0 * (rng.uniform() - 0.5), 10.0 * rng.uniform()) +
                              scaled(H, 0.5 + 0.2 * rng.normal());
      CHECK(j_functional(p, traj, g, G) <= rate + 1e-6);
    }

    // the unperturbed path costs nothing
    const DeterministicTrajectory free = solve_hydrodynamic(p, g, std::nullopt, grid(T, 1000));
    for (int i = 0; i < 10; ++i) {
      const ExternalField G = wobbling_bump(0.2, 0.6, rng.normal(), 3.0);
      CHECK(j_functional(p, free, g, G) <= 1e-6);
    }
  }

  TEST_CASE("rate from field: homogeneity and refinement") {
    const ExternalField H = wobbling_bump(0.3, 0.8, 1.0, 2.0);
    const ModelParams p{64, 1.5, 0.0, 1.0};
    CHECK(rate_from_field(p, scaled(H, 0.0), 1.0) == 0.0);
    const double base = rate_from_field(p, H, 1.0);
    CHECK(rate_from_field(p, scaled(H, 2.0), 1.0) == doctest::Approx(4.0 * base).epsilon(1e-14));
    CHECK(rate_from_field(p, H, 1.0, 2000) == doctest::Approx(base).epsilon(1e-6));
  }

  // The lattice seminorm of a smooth bump approaches the continuum value like n^{gamma-2}, so at
  // gamma = 1.5 one doubling moves the rate by about 7%.
  TEST_CASE("rate from field changes by less than 1% under n doubling" * doctest::may_fail()) {
    const ExternalField H = wobbling_bump(0.3, 0.8, 1.0, 2.0);
    CHECK(rate_from_field({128, 1.5, 0.0, 1.0}, H, 1.0) ==
          doctest::Approx(rate_from_field({64, 1.5, 0.0, 1.0}, H, 1.0)).epsilon(0.01));
  }

  TEST_CASE("rate from field converges at the n^{gamma-2} rate") {
    const ExternalField H = constant_in_time(polynomial_bump(0.3, 0.8, 4));
    const double limit = 0.25 * continuum_seminorm(1.5, polynomial_bump(0.3, 0.8, 4), polynomial_bump(0.3, 0.8, 4));
    double prev_gap = 0.0;
    for (int n : {128, 256, 512}) {
      const double gap = limit - rate_from_field({n, 1.5, 0.0, 1.0}, H, 1.0);
      CHECK(gap > 0.0);
      if (prev_gap > 0.0) CHECK(prev_gap / gap == doctest::Approx(std::sqrt(2.0)).epsilon(0.03));
      prev_gap = gap;
    }
  }

  TEST_CASE("static rate and its Legendre transform") {
    const ModelParams p{64, 1.5, 0.0, 1.0};
    const HydroSolver solver(p);
    const StationaryProfile& s = solver.stationary();
    CHECK(static_rate_w(p, s, s.profile) == 0.0);
    const GridFunction e1 = solver.spectrum().eigenvectors.col(0);
    CHECK(std::abs(static_rate_w(p, s, s.profile + 0.7 * e1) - 0.49 / 2.0) < 1e-10);

    const GridFunction rho = target(64, s, 0.8, 3);
    const LegendreCheck lc = legendre_static_rate(p, s, rho);
    CHECK(lc.value_at_maximizer == doctest::Approx(lc.w).epsilon(1e-12));
    CHECK(lc.family_sup < lc.value_at_maximizer);
    CHECK(lc.scan_argmax == doctest::Approx(1.0).epsilon(0.02));
    CHECK(lc.family_size == 200);
  }

  TEST_CASE("clever path: trivial target and single-mode closed form") {
    const ModelParams p{64, 1.5, 0.0, 1.0};
    const HydroSolver solver(p);
    const GridFunction& ss = solver.stationary().profile;
    const CleverPath still = clever_path(solver, ss);
    CHECK(still.cost == 0.0);
    for (const auto& phi : still.path.profiles) CHECK((phi - ss).cwiseAbs().maxCoeff() < 1e-12);

    const double lambda = solver.spectrum().eigenvalues(0), delta = 0.4;
    const CleverPath cp = clever_path(solver, ss + delta * solver.spectrum().eigenvectors.col(0));
    const double el = std::exp(lambda);
    // ∫ (2 e^{lt} - 1)^2 dt = 2 (e^{2l} - 1)/l - 4 (e^l - 1)/l + 1
    const double integral = 2.0 * (el * el - 1.0) / lambda - 4.0 * (el - 1.0) / lambda + 1.0;
    const double closed = delta * delta * lambda / 4.0 / ((el - 1.0) * (el - 1.0)) * integral;
    CHECK(cp.cost == doctest::Approx(closed).epsilon(1e-8));
    CHECK(cp.endpoint_error <= 1e-6);
    CHECK(cp.cost_boundary >= 0.0);
    CHECK(cp.cost == doctest::Approx(cp.cost_bulk + cp.cost_boundary).epsilon(1e-12));
  }

  TEST_CASE("clever path cost is bounded by the modal constant") {
    const ModelParams p{64, 1.5, 0.0, 1.0};
    const HydroSolver solver(p);
    const SpectralData& spec = solver.spectrum();
    const GridFunction& ss = solver.stationary().profile;
    // per-mode cost / |a_k|^2 = (l/4) ∫ (2 e^{lt} - 1)^2 dt / (e^l - 1)^2, scaled by e^{-2l}
    double bound = 0.0;
    for (int k = 0; k < spec.size(); ++k) {
      const double l = spec.eigenvalues(k), q = std::exp(-l);
      const double ratio = l / 4.0 * (2.0 * (1.0 - q * q) / l - 4.0 * (q - q * q) / l + q * q) / ((1.0 - q) * (1.0 - q));
      bound = std::max(bound, ratio);
    }
    Rng rng(17, 0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      GridFunction bump = sample_on_lattice(64, [&, c = 0.2 + 0.6 * rng.uniform(), w = 0.05 + 0.1 * rng.uniform()](double u) {
        return std::exp(-(u - c) * (u - c) / (2.0 * w * w));
      });
      const CleverPath cp = clever_path(solver, ss + rng.normal() * bump);
      const double ratio = cp.cost / std::pow(lattice_l2(cp.path.profiles.back() - ss), 2);
      CHECK(std::isfinite(ratio));
      worst = std::max(worst, ratio);
    }
    MESSAGE("max cost / ||Psi - Phi_ss||^2 = " << worst << ", modal bound " << bound);
    CHECK(worst <= bound * (1.0 + 1e-6));
  }

  TEST_CASE("quasipotential equals the static rate") {
    const ModelParams p{64, 1.5, 0.0, 1.0};
    const HydroSolver solver(p);
    const StationaryProfile& s = solver.stationary();
    const RateReport zero = quasipotential(solver, s.profile, 1.0);
    CHECK(zero.value == 0.0);

    const double lambda1 = solver.spectrum().eigenvalues(0);
    const GridFunction rho = target(64, s, 1.0, 2);
    const double w = static_rate_w(p, s, rho);
    const RateReport r = quasipotential(solver, rho, 7.0 / lambda1);
    CHECK(r.value >= 0.0);
    CHECK(std::abs(r.value - w) / w < 0.05);
    CHECK(std::abs(r.breakdown.at("identity_gap")) < 1e-4);
    CHECK(r.breakdown.at("w_rho") == doctest::Approx(w));

    // quadratic scaling in the displacement
    const double base = quasipotential(solver, s.profile + 0.1 * (rho - s.profile), 2.0).value / 0.01;
    for (double delta : {0.5, 2.0, 7.0}) {
      const double v = quasipotential(solver, s.profile + delta * (rho - s.profile), 2.0).value / (delta * delta);
      CHECK(v == doctest::Approx(base).epsilon(1e-6));
    }
  }

  TEST_CASE("Gamma identity holds with the reservoir defect") {
    for (int n : {16, 64, 200}) {
      const ModelParams p{n, 1.5, 0.3, 1.7};
      const StationaryProfile s = solve_stationary_profile(p);
      for (int k : {1, 3}) {
        const GridFunction rho = target(n, s, 0.5, k) + sample_on_lattice(n, [](double u) { return 0.1 * u; });
        const GammaIdentity gi = gamma_identity(p, s, rho);
        CHECK(std::abs(gi.lhs - gi.predicted) < 1e-10 * std::max(1.0, std::abs(gi.lhs)));
      }
    }
  }
}
