#include "fracgl/params.hpp"

#include <sstream>

namespace fracgl {

void validate(const ModelParams& p) {
  if (p.n < 3) throw DomainError("lattice size n must be at least 3, got " + std::to_string(p.n));
  if (!(p.gamma > 1.0 && p.gamma < 2.0)) {
    std::ostringstream os;
    os << "gamma must lie in (1,2), got " << p.gamma;
    throw DomainError(os.str());
  }
  if (!std::isfinite(p.phi_l) || !std::isfinite(p.phi_r)) throw DomainError("reservoir densities must be finite");
}

void require_grid(const ModelParams& params, const Eigen::Ref<const Eigen::VectorXd>& g, const char* what) {
  if (g.size() != params.n - 1) {
    std::ostringstream os;
    os << what << ": expected " << params.n - 1 << " interior values, got " << g.size();
    throw DimensionError(os.str());
  }
}

GridFunction sample_on_lattice(int n, const std::function<double(double)>& f) {
  GridFunction g(n - 1);
  for (int x = 1; x < n; ++x) g(x - 1) = f(static_cast<double>(x) / n);
  return g;
}

double lattice_pairing(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::VectorXd>& g) {
  if (f.size() != g.size()) throw DimensionError("lattice_pairing: size mismatch");
  return f.dot(g) / static_cast<double>(f.size() + 1);
}

double lattice_l2(const Eigen::Ref<const Eigen::VectorXd>& f) {
  return std::sqrt(f.squaredNorm() / static_cast<double>(f.size() + 1));
}

}  // namespace fracgl
