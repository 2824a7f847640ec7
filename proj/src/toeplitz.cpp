#include "fracgl/toeplitz.hpp"

#include <unsupported/Eigen/FFT>

#include <mutex>
#include <vector>

namespace fracgl {

struct SymmetricToeplitz::Plan {
  Eigen::Index length = 0;
  std::vector<std::complex<double>> symbol;
  // kissfft keeps mutable twiddle caches, so concurrent applies are serialized
  mutable std::mutex mutex;
  mutable Eigen::FFT<double> fft;
};

SymmetricToeplitz::SymmetricToeplitz(Eigen::VectorXd column) : column_(std::move(column)), plan_(std::make_unique<Plan>()) {
  const Eigen::Index m = column_.size();
  Eigen::Index len = 1;
  while (len < 2 * m - 1) len <<= 1;
  plan_->length = len;
  std::vector<double> c(static_cast<std::size_t>(len), 0.0);
  for (Eigen::Index k = 0; k < m; ++k) c[static_cast<std::size_t>(k)] = column_(k);
  for (Eigen::Index k = 1; k < m; ++k) c[static_cast<std::size_t>(len - k)] = column_(k);
  plan_->fft.fwd(plan_->symbol, c);
}

SymmetricToeplitz::~SymmetricToeplitz() = default;
SymmetricToeplitz::SymmetricToeplitz(SymmetricToeplitz&&) noexcept = default;
SymmetricToeplitz& SymmetricToeplitz::operator=(SymmetricToeplitz&&) noexcept = default;

Eigen::VectorXd SymmetricToeplitz::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const Eigen::Index m = column_.size();
  const auto len = static_cast<std::size_t>(plan_->length);
  std::vector<double> padded(len, 0.0);
  for (Eigen::Index i = 0; i < m; ++i) padded[static_cast<std::size_t>(i)] = x(i);
  std::vector<std::complex<double>> spectrum;
  std::vector<double> out;
  {
    std::lock_guard lock(plan_->mutex);
    plan_->fft.fwd(spectrum, padded);
    for (std::size_t k = 0; k < len; ++k) spectrum[k] *= plan_->symbol[k];
    plan_->fft.inv(out, spectrum);
  }
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) y(i) = out[static_cast<std::size_t>(i)];
  return y;
}

Eigen::MatrixXd SymmetricToeplitz::dense() const {
  const Eigen::Index m = column_.size();
  Eigen::MatrixXd t(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) t(i, j) = column_(std::abs(i - j));
  return t;
}

Eigen::VectorXd SymmetricToeplitz::row_sums() const {
  const Eigen::Index m = column_.size();
  Eigen::VectorXd prefix(m);  // prefix(k) = sum_{j=1..k} column(j)
  prefix(0) = 0.0;
  for (Eigen::Index k = 1; k < m; ++k) prefix(k) = prefix(k - 1) + column_(k);
  Eigen::VectorXd s(m);
  for (Eigen::Index i = 0; i < m; ++i) s(i) = column_(0) + prefix(i) + prefix(m - 1 - i);
  return s;
}

}  // namespace fracgl
