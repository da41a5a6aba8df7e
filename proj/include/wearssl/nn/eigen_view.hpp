#pragma once

// Row-major Eigen views over raw tensor storage.

#include <Eigen/Core>

namespace wearssl::nn {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Eigen::Map<RowMatrix> matrix(double* p, std::size_t rows, std::size_t cols) {
  return {p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
inline Eigen::Map<const RowMatrix> const_matrix(const double* p, std::size_t rows, std::size_t cols) {
  return {p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)};
}
inline Eigen::Map<Eigen::VectorXd> vector(double* p, std::size_t n) {
  return {p, static_cast<Eigen::Index>(n)};
}
inline Eigen::Map<const Eigen::VectorXd> const_vector(const double* p, std::size_t n) {
  return {p, static_cast<Eigen::Index>(n)};
}

}  // namespace wearssl::nn
