#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace test_util {

inline loadguide::nd::Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, scale);
  loadguide::nd::Matrix m(rows, cols);
  for (auto& v : m.data()) v = dist(rng);
  return m;
}

inline void expect_matrix_near(const loadguide::nd::Matrix& a, const loadguide::nd::Matrix& b, double tol);

}  // namespace test_util

#include <gtest/gtest.h>

inline void test_util::expect_matrix_near(const loadguide::nd::Matrix& a, const loadguide::nd::Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a.data()[i], b.data()[i], tol) << "at flat index " << i;
}
