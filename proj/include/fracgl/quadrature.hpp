#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace fracgl {

// Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int points);

  int size() const { return static_cast<int>(nodes_.size()); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  template <class F>
  double integrate(F&& f, double a, double b) const {
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double acc = 0.0;
    for (Eigen::Index k = 0; k < nodes_.size(); ++k) acc += weights_(k) * f(mid + half * nodes_(k));
    return half * acc;
  }

  // composite rule over the breakpoints (ascending)
  template <class F>
  double integrate(F&& f, const std::vector<double>& breaks, int panels_per_piece = 1) const {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
      const double h = (breaks[i + 1] - breaks[i]) / panels_per_piece;
      for (int p = 0; p < panels_per_piece; ++p) acc += integrate(f, breaks[i] + p * h, breaks[i] + (p + 1) * h);
    }
    return acc;
  }

 private:
  Eigen::VectorXd nodes_;
  Eigen::VectorXd weights_;
};

// Panels on [a, b] refined geometrically towards the endpoint `toward` (a or b),
// down to a finest width `finest`.
std::vector<double> graded_breaks(double a, double b, double finest, bool toward_b);

// Composite Simpson over an equispaced grid; `values` has an odd number of entries.
double simpson(const std::vector<double>& values, double h);

// Trapezoid over arbitrary ascending abscissae.
double trapezoid(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracgl
