#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::labeling {

struct KMeansResult {
  std::vector<int> assignments;
  nd::Matrix centroids;  // k x w
  double inertia = 0.0;
  std::vector<double> inertia_history;  // one entry per assignment step
  int iterations = 0;
};

std::size_t count_distinct_rows(const nd::Matrix& points);

/// Lloyd's algorithm on Euclidean distance with k-means++ seeding. An empty
/// cluster is reseeded at the point farthest from its centroid. Stops when
/// assignments are stable or after max_iter updates. With restarts > 1 the
/// run with the lowest inertia is kept (the first run uses `seed` itself).
KMeansResult kmeans(const nd::Matrix& points, std::size_t k, std::uint64_t seed, int max_iter = 100,
                    int restarts = 1);

}  // namespace loadguide::labeling
