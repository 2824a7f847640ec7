#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace fracgl {

// Entry i holds the value at lattice site x = i + 1, macroscopic point u = x / n.
using GridFunction = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class StabilityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ResidualError : public NumericalError {
 public:
  ResidualError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct ModelParams {
  int n = 64;
  double gamma = 1.5;
  double phi_l = 0.0;
  double phi_r = 1.0;
};

void validate(const ModelParams& params);

inline int sites(const ModelParams& p) { return p.n - 1; }

// n^gamma, the time acceleration of the lattice dynamics
inline double speed(const ModelParams& p) { return std::pow(static_cast<double>(p.n), p.gamma); }

void require_grid(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g, const char* what);

GridFunction sample_on_lattice(int n, const std::function<double(double)>& f);

// (1/n) sum_x f(x) g(x)
double lattice_pairing(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::VectorXd>& g);

// sqrt((1/n) sum_x f(x)^2)
double lattice_l2(const Eigen::Ref<const Eigen::VectorXd>& f);

struct FieldState {
  GridFunction phi;
  double time = 0.0;
};

class KahanSum {
 public:
  void add(double v) {
    const double y = v - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace fracgl
