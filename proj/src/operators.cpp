#include "fracgl/operators.hpp"

#include "fracgl/kernel.hpp"
#include "fracgl/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace fracgl {

TestFunction polynomial_bump(double a, double b, int power) {
  if (!(0.0 <= a && a < b && b <= 1.0)) throw DomainError("polynomial_bump: need 0 <= a < b <= 1");
  if (power < 3) throw DomainError("polynomial_bump: power >= 3 required for a C^2 function");
  const double s2 = 0.25 * (b - a) * (b - a);
  const double p = power;
  auto inside = [a, b](double u) { return u > a && u < b; };
  TestFunction F;
  F.f = [=](double u) { return inside(u) ? std::pow((u - a) * (b - u) / s2, p) : 0.0; };
  F.d1 = [=](double u) {
    if (!inside(u)) return 0.0;
    const double q = (u - a) * (b - u) / s2, dq = (a + b - 2.0 * u) / s2;
    return p * std::pow(q, p - 1.0) * dq;
  };
  F.d2 = [=](double u) {
    if (!inside(u)) return 0.0;
    const double q = (u - a) * (b - u) / s2, dq = (a + b - 2.0 * u) / s2, ddq = -2.0 / s2;
    return p * (p - 1.0) * std::pow(q, p - 2.0) * dq * dq + p * std::pow(q, p - 1.0) * ddq;
  };
  F.support = Support{a, b};
  return F;
}

TestFunction sine_mode(int k) {
  const double w = k * std::numbers::pi;
  return {[w](double u) { return std::sin(w * u); }, [w](double u) { return w * std::cos(w * u); },
          [w](double u) { return -w * w * std::sin(w * u); }, std::nullopt};
}

TestFunction constant_function(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }, std::nullopt};
}

TestFunction scaled(const TestFunction& f, double s) {
  return {[f, s](double u) { return s * f.f(u); }, [f, s](double u) { return s * f.d1(u); },
          [f, s](double u) { return s * f.d2(u); }, f.support};
}

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 1.0 && gamma < 2.0)) throw DomainError("gamma must lie in (1,2)");
}

std::vector<double> edges_of(const TestFunction& F) {
  if (!F.support) return {};
  return {F.support->a, F.support->b};
}

// sorted breakpoints of [lo, hi] including the interior candidates
std::vector<double> breaks_within(double lo, double hi, std::vector<double> candidates) {
  std::vector<double> out{lo};
  std::sort(candidates.begin(), candidates.end());
  for (double c : candidates)
    if (c > lo * (1.0 + 1e-14) + 1e-300 && c < hi * (1.0 - 1e-14)) out.push_back(c);
  out.push_back(hi);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double regional_laplacian_pointwise(double gamma, const TestFunction& F, double u, const QuadratureOptions& q) {
  require_gamma(gamma);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("regional_laplacian_pointwise: u outside [0,1]");
  if (!F.f || !F.d1 || !F.d2) throw DomainError("regional_laplacian_pointwise: F needs two derivatives");
  const double c = kernel_constant(gamma);
  const double k = 1.0 / (2.0 - gamma);  // h = t^k turns h^{1-gamma} dh into k dt
  const double fu = F.f(u), d1 = F.d1(u), d2 = F.d2(u);
  const double hm = std::min(u, 1.0 - u), hmax = std::max(u, 1.0 - u);
  const double hc = std::min(q.h_cut, hm);
  const GaussLegendre gl(q.points);

  std::vector<double> kinks;
  for (double e : edges_of(F)) kinks.push_back(std::fabs(e - u));
  auto to_t = [gamma](std::vector<double> hs) {
    for (auto& h : hs) h = std::pow(h, 2.0 - gamma);
    return hs;
  };

  double total = d2 * std::pow(hc, 2.0 - gamma) / (2.0 - gamma);

  if (hm > hc) {
    auto paired = [&](double t) {
      const double h = std::pow(t, k);
      return k * (F.f(u + h) + F.f(u - h) - 2.0 * fu) / (h * h);
    };
    total += gl.integrate(paired, to_t(breaks_within(hc, hm, kinks)), q.panels);
  }

  if (hmax > hm) {
    const double side = u < 0.5 ? 1.0 : -1.0;
    auto one_sided = [&](double t) {
      const double h = std::pow(t, k);
      return k * (F.f(u + side * h) - fu - d1 * side * h) / (h * h);
    };
    total += gl.integrate(one_sided, to_t(breaks_within(hm, hmax, kinks)), q.panels);
  }

  double boundary = 0.0;
  if (d1 != 0.0) {
    if (u == 0.0 || u == 1.0) throw DomainError("regional_laplacian_pointwise: unbounded at the boundary when F'(u) != 0");
    boundary = d1 / (gamma - 1.0) * (std::pow(1.0 - u, 1.0 - gamma) - std::pow(u, 1.0 - gamma));
  }
  const double value = c * (total - boundary);
  if (!std::isfinite(value)) throw NumericalError("regional_laplacian_pointwise: non-finite quadrature");
  return value;
}

double continuum_seminorm(double gamma, const TestFunction& F, const TestFunction& G, const QuadratureOptions& q) {
  require_gamma(gamma);
  const double c = kernel_constant(gamma);
  const double k = 1.0 / (2.0 - gamma);
  const GaussLegendre gl(q.points);
  std::vector<double> edges = edges_of(F);
  for (double e : edges_of(G)) edges.push_back(e);

  // inner(u) = ∫_0^{1-u} dF dG h^{-1-gamma} dh, with both orderings of (u,v) folded into one
  auto inner = [&](double u) {
    const double hmax = 1.0 - u;
    if (hmax <= 0.0) return 0.0;
    std::vector<double> kinks;
    for (double e : edges)
      if (e > u) kinks.push_back(e - u);
    auto br = breaks_within(0.0, hmax, kinks);
    for (auto& h : br) h = std::pow(h, 2.0 - gamma);
    const double fu = F.f(u), gu = G.f(u), f1 = F.d1(u), g1 = G.d1(u);
    auto integrand = [&](double t) {
      const double h = std::pow(t, k);
      if (h < 1e-9) return k * f1 * g1;
      return k * (F.f(u + h) - fu) * (G.f(u + h) - gu) / (h * h);
    };
    return gl.integrate(integrand, br, q.panels);
  };

  // the last piece is graded towards u = 1, where inner(u) ~ (1-u)^{2-gamma}
  const std::vector<double> outer = breaks_within(0.0, 1.0, edges);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < outer.size(); ++i) {
    if (i + 2 < outer.size()) {
      acc += gl.integrate(inner, {outer[i], outer[i + 1]}, q.panels);
      continue;
    }
    const auto graded = graded_breaks(outer[i], outer[i + 1], 1e-10, true);
    acc += gl.integrate(inner, graded, 1);
  }
  const double value = c * acc;
  if (!std::isfinite(value)) throw NumericalError("continuum_seminorm: non-finite quadrature");
  return value;
}

double continuum_laplacian_pairing(double gamma, const TestFunction& F, const TestFunction& G,
                                   const QuadratureOptions& q) {
  const GaussLegendre gl(q.points);
  double lo = 0.0, hi = 1.0;
  if (F.support) {
    lo = F.support->a;
    hi = F.support->b;
  }
  std::vector<double> edges = edges_of(G);
  auto br = breaks_within(lo, hi, edges);
  auto integrand = [&](double u) { return -F.f(u) * regional_laplacian_pointwise(gamma, G, u, q); };
  if (!G.support) {
    // L G carries u^{1-gamma} singularities at both ends
    std::vector<double> graded;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      auto left = graded_breaks(br[i], 0.5 * (br[i] + br[i + 1]), 1e-10, false);
      auto right = graded_breaks(0.5 * (br[i] + br[i + 1]), br[i + 1], 1e-10, true);
      graded.insert(graded.end(), left.begin(), left.end() - 1);
      graded.insert(graded.end(), right.begin(), right.end() - 1);
    }
    graded.push_back(br.back());
    br = graded;
    return gl.integrate(integrand, br, 1);
  }
  return gl.integrate(integrand, br, q.panels);
}

double laplacian_sup_gap(const ModelParams& params, const TestFunction& F, const QuadratureOptions& q) {
  validate(params);
  const GridFunction discrete = discrete_fractional_laplacian(params, F.on_lattice(params.n));
  double gap = 0.0;
  for (int x = 1; x < params.n; ++x) {
    const double u = static_cast<double>(x) / params.n;
    gap = std::max(gap, std::fabs(discrete(x - 1) - regional_laplacian_pointwise(params.gamma, F, u, q)));
  }
  return gap;
}

Eigen::VectorXd SpectralData::coefficients(const Eigen::Ref<const Eigen::VectorXd>& f) const {
  if (f.size() != n - 1) throw DimensionError("SpectralData::coefficients: size mismatch");
  return eigenvectors.transpose() * f / static_cast<double>(n);
}

GridFunction SpectralData::synthesize(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  if (coeffs.size() != size()) throw DimensionError("SpectralData::synthesize: size mismatch");
  return eigenvectors * coeffs;
}

double SpectralData::projection_residual(const Eigen::Ref<const Eigen::VectorXd>& f) const {
  const GridFunction r = f - synthesize(coefficients(f));
  return r.squaredNorm() / n;
}

SpectralData dirichlet_spectrum(const ModelParams& params, int k_max) {
  validate(params);
  if (k_max < 1 || k_max > params.n - 1) throw DomainError("dirichlet_spectrum: need 1 <= k_max <= n-1");
  const Eigen::MatrixXd a = -build_drift_system(params).m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw NumericalError("dirichlet_spectrum: eigensolver did not converge");

  SpectralData spec;
  spec.n = params.n;
  spec.gamma = params.gamma;
  spec.eigenvalues = solver.eigenvalues().head(k_max);
  spec.eigenvectors = std::sqrt(static_cast<double>(params.n)) * solver.eigenvectors().leftCols(k_max);
  for (int k = 0; k < k_max; ++k) {
    auto col = spec.eigenvectors.col(k);
    Eigen::Index pivot = 0;
    col.cwiseAbs().maxCoeff(&pivot);
    // orient so that the first entry of significant size is positive
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::fabs(col(i)) > 1e-3 * std::fabs(col(pivot))) {
        if (col(i) < 0) col *= -1.0;
        break;
      }
    }
  }
  if (spec.eigenvalues(0) <= 0.0) throw NumericalError("dirichlet_spectrum: operator is not positive definite");
  const Eigen::MatrixXd unit = spec.eigenvectors / std::sqrt(static_cast<double>(params.n));
  spec.max_residual =
      ((a * unit - unit * spec.eigenvalues.asDiagonal()).colwise().norm()).maxCoeff();
  return spec;
}

GridFunction inverse_dirichlet_apply(const SpectralData& spec, const Eigen::Ref<const Eigen::VectorXd>& t, double tol) {
  if (t.size() != spec.n - 1) throw DimensionError("inverse_dirichlet_apply: size mismatch");
  const Eigen::VectorXd c = spec.coefficients(t);
  const double energy = t.squaredNorm() / spec.n;
  const double residual = spec.projection_residual(t);
  if (residual > tol * energy) {
    throw ResidualError("inverse_dirichlet_apply: right-hand side not resolved by the retained modes (relative residual " +
                            std::to_string(residual / energy) + ")",
                        residual / energy);
  }
  return spec.synthesize(c.cwiseQuotient(spec.eigenvalues));
}

void write_spectrum_csv(std::ostream& os, const SpectralData& spec) {
  os << "k,lambda_k";
  for (int x = 1; x < spec.n; ++x) os << ",e_" << x;
  os << '\n';
  os.precision(17);
  for (int k = 0; k < spec.size(); ++k) {
    os << k + 1 << ',' << spec.eigenvalues(k);
    for (int x = 0; x < spec.n - 1; ++x) os << ',' << spec.eigenvectors(x, k);
    os << '\n';
  }
}

}  // namespace fracgl
