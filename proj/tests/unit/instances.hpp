#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

#include "dreg/link.hpp"
#include "dreg/rng.hpp"

namespace dreg::fixtures {

/// Random logistic instance: intercept plus standard-normal columns, a sparse
/// coefficient vector and Bernoulli responses.
struct LogisticInstance {
  Eigen::MatrixXd z;
  Eigen::VectorXd yu;
};

inline LogisticInstance random_logistic(std::uint64_t seed, int n, int p, int active = 3) {
  StreamEngine eng(seed, 0x1e57);
  LogisticInstance out{Eigen::MatrixXd(n, p), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    out.z(i, 0) = 1.0;
    for (int k = 1; k < p; ++k) out.z(i, k) = standard_normal(eng);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (int k = 0; k < std::min(active, p); ++k) b(k) = (k % 2 == 0 ? 1.0 : -1.0) / (1.0 + k);
  const Eigen::VectorXd eta = out.z * b;
  for (int i = 0; i < n; ++i) out.yu(i) = eng.uniform01() < logistic(eta(i)) ? 1.0 : 0.0;
  return out;
}

inline Eigen::MatrixXd random_matrix(std::uint64_t seed, int rows, int cols) {
  StreamEngine eng(seed, 0x3a7);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = standard_normal(eng);
  return m;
}

/// Weights in (0, 1/4].
inline Eigen::VectorXd random_f2(std::uint64_t seed, int n) {
  StreamEngine eng(seed, 0xf2);
  Eigen::VectorXd f2(n);
  for (int i = 0; i < n; ++i) f2(i) = 0.02 + 0.23 * eng.uniform01();
  return f2;
}

}  // namespace dreg::fixtures
