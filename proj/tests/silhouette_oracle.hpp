#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace test_util {

// Direct transcription of the silhouette definition: for every point, mean
// distance to its own cluster (excluding itself) and the smallest mean
// distance to any other non-empty cluster.
inline double brute_force_silhouette(const loadguide::nd::Matrix& x, const std::vector<int>& labels) {
  const std::size_t n = x.rows();
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  auto dist = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(i, c) - x(j, c);
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int own = labels[i];
    if (sizes[static_cast<std::size_t>(own)] <= 1) continue;
    std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) sum[static_cast<std::size_t>(labels[j])] += dist(i, j);
    const double a = sum[static_cast<std::size_t>(own)] / static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
      b = std::min(b, sum[static_cast<std::size_t>(c)] / static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    }
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

}  // namespace test_util
