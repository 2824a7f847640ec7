#include "fracgl/field.hpp"

#include <cmath>

namespace fracgl {

GridFunction ExternalField::on_lattice(int n, double t) const {
  return sample_on_lattice(n, [&](double u) { return value(t, u); });
}

GridFunction ExternalField::time_derivative_on_lattice(int n, double t) const {
  return sample_on_lattice(n, [&](double u) { return time_derivative(t, u); });
}

void validate_field(const ExternalField& field) {
  if (!field.value || !field.time_derivative) throw DomainError("external field needs value and time derivative");
  if (!(field.support.a > 0.0 && field.support.a < field.support.b && field.support.b < 1.0))
    throw DomainError("external field support must be a closed subinterval of (0,1)");
}

ExternalField separable_field(const TestFunction& spatial, std::function<double(double)> amplitude,
                              std::function<double(double)> amplitude_derivative) {
  if (!spatial.support) throw DomainError("separable_field: spatial factor must be compactly supported");
  ExternalField h;
  h.value = [spatial, amplitude](double t, double u) { return amplitude(t) * spatial.f(u); };
  h.time_derivative = [spatial, amplitude_derivative](double t, double u) { return amplitude_derivative(t) * spatial.f(u); };
  h.support = *spatial.support;
  validate_field(h);
  return h;
}

ExternalField constant_in_time(const TestFunction& spatial) {
  return separable_field(spatial, [](double) { return 1.0; }, [](double) { return 0.0; });
}

ExternalField scaled(const ExternalField& field, double s) {
  ExternalField h = field;
  h.value = [field, s](double t, double u) { return s * field.value(t, u); };
  h.time_derivative = [field, s](double t, double u) { return s * field.time_derivative(t, u); };
  return h;
}

ExternalField operator+(const ExternalField& a, const ExternalField& b) {
  ExternalField h;
  h.value = [a, b](double t, double u) { return a.value(t, u) + b.value(t, u); };
  h.time_derivative = [a, b](double t, double u) { return a.time_derivative(t, u) + b.time_derivative(t, u); };
  h.support = {std::min(a.support.a, b.support.a), std::max(a.support.b, b.support.b)};
  return h;
}

LatticeField::LatticeField(const ExternalField& field, const ModelParams& params, double dt, int steps) : dt_(dt) {
  validate_field(field);
  if (steps < 0 || !(dt > 0.0)) throw DomainError("LatticeField: need dt > 0 and steps >= 0");
  const DiscreteLaplacian lap(params);
  values_.reserve(static_cast<std::size_t>(steps) + 1);
  laplacian_.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) {
    values_.push_back(field.on_lattice(params.n, k * dt));
    laplacian_.push_back(lap.apply(values_.back()));
    const auto& h = values_.back();
    if (h(0) != 0.0 || h(h.size() - 1) != 0.0) clear_ = false;
  }
}

}  // namespace fracgl
