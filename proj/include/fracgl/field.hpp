#pragma once

#include "fracgl/kernel.hpp"
#include "fracgl/operators.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace fracgl {

// H(t,u) with compact spatial support [a,b] ⊂ (0,1), fixed in time.
struct ExternalField {
  std::function<double(double, double)> value;
  std::function<double(double, double)> time_derivative;
  Support support{0.25, 0.75};

  double operator()(double t, double u) const { return value(t, u); }
  GridFunction on_lattice(int n, double t) const;
  GridFunction time_derivative_on_lattice(int n, double t) const;
};

// Test functions G(t,u) of the weak formulation share the representation.
using SpaceTimeFunction = ExternalField;

void validate_field(const ExternalField& field);

// H(t,u) = A(t) F(u)
ExternalField separable_field(const TestFunction& spatial, std::function<double(double)> amplitude,
                              std::function<double(double)> amplitude_derivative);
ExternalField constant_in_time(const TestFunction& spatial);
ExternalField scaled(const ExternalField& field, double s);
ExternalField operator+(const ExternalField& a, const ExternalField& b);

// Lattice samples of H and of L_n H on the grid t_k = k dt, k = 0..steps.
class LatticeField {
 public:
  LatticeField(const ExternalField& field, const ModelParams& params, double dt, int steps);

  int steps() const { return static_cast<int>(values_.size()) - 1; }
  double dt() const { return dt_; }
  const GridFunction& values(int k) const { return values_.at(static_cast<std::size_t>(k)); }
  const GridFunction& laplacian(int k) const { return laplacian_.at(static_cast<std::size_t>(k)); }
  // H vanishes at sites 1 and n-1 for every cached time
  bool clear_of_boundary_sites() const { return clear_; }

 private:
  double dt_;
  std::vector<GridFunction> values_;
  std::vector<GridFunction> laplacian_;
  bool clear_ = true;
};

}  // namespace fracgl
