#pragma once

#include <Eigen/Core>

namespace gmcr::linalg {

template <int N>
struct SymmetricEigen {
  Eigen::Matrix<double, N, 1> values;   // descending
  Eigen::Matrix<double, N, N> vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi sweeps on a symmetric matrix (upper triangle is read).
template <int N>
SymmetricEigen<N> jacobi_eigen(const Eigen::Matrix<double, N, N>& m);

extern template SymmetricEigen<3> jacobi_eigen<3>(const Eigen::Matrix<double, 3, 3>&);
extern template SymmetricEigen<4> jacobi_eigen<4>(const Eigen::Matrix<double, 4, 4>&);

}  // namespace gmcr::linalg
