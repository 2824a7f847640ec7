#include "fracgl/quadrature.hpp"

#include "fracgl/params.hpp"

#include <numbers>
#include <utility>

namespace fracgl {

namespace {

// P_m(x) and P_m'(x) by the three-term recurrence
std::pair<double, double> legendre(int m, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= m; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, m * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre::GaussLegendre(int points) : nodes_(points), weights_(points) {
  if (points < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  if (points == 1) {
    nodes_(0) = 0.0;
    weights_(0) = 2.0;
    return;
  }
  for (int i = 0; i < (points + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(points, x);
      const double dx = p / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double dp = legendre(points, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_(i) = -x;
    nodes_(points - 1 - i) = x;
    weights_(i) = w;
    weights_(points - 1 - i) = w;
  }
  if (points % 2 == 1) nodes_(points / 2) = 0.0;
}

std::vector<double> graded_breaks(double a, double b, double finest, bool toward_b) {
  std::vector<double> offsets{0.0};
  double w = b - a;
  while (w > finest) {
    w *= 0.5;
    offsets.push_back(w);
  }
  // offsets measured from the refined endpoint: 0, w, w/2, ... down to the finest width
  std::vector<double> breaks;
  if (toward_b) {
    breaks.push_back(a);
    for (std::size_t i = 1; i < offsets.size(); ++i) breaks.push_back(b - offsets[i]);
    breaks.push_back(b);
  } else {
    breaks.push_back(a);
    for (std::size_t i = offsets.size() - 1; i >= 1; --i) breaks.push_back(a + offsets[i]);
    breaks.push_back(b);
  }
  return breaks;
}

double simpson(const std::vector<double>& v, double h) {
  if (v.size() < 3 || v.size() % 2 == 0) throw DomainError("simpson: need an odd number (>= 3) of samples");
  double acc = v.front() + v.back();
  for (std::size_t i = 1; i + 1 < v.size(); ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * v[i];
  return acc * h / 3.0;
}

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("trapezoid: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += 0.5 * (x[i + 1] - x[i]) * (y[i] + y[i + 1]);
  return acc;
}

}  // namespace fracgl
