#pragma once

#include <Eigen/Dense>

#include <complex>
#include <memory>

namespace fracgl {

// Symmetric Toeplitz matrix T(i,j) = column(|i-j|), applied in O(m log m)
// through a circulant embedding of size 2^k >= 2m - 1.
class SymmetricToeplitz {
 public:
  explicit SymmetricToeplitz(Eigen::VectorXd column);
  ~SymmetricToeplitz();
  SymmetricToeplitz(SymmetricToeplitz&&) noexcept;
  SymmetricToeplitz& operator=(SymmetricToeplitz&&) noexcept;

  Eigen::Index size() const { return column_.size(); }
  const Eigen::VectorXd& column() const { return column_; }

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd dense() const;

  // sum_j T(i,j) for every row, via prefix sums
  Eigen::VectorXd row_sums() const;

 private:
  struct Plan;
  Eigen::VectorXd column_;
  std::unique_ptr<Plan> plan_;
};

}  // namespace fracgl
