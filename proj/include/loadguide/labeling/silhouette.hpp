#pragma once

#include <span>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::labeling {

/// Mean silhouette (b - a) / max(a, b) under Euclidean distance. Points in
/// singleton clusters, and points with max(a, b) = 0, contribute 0.
/// Requires at least two non-empty clusters.
double silhouette(const nd::Matrix& points, std::span<const int> assignments);

/// Silhouette of several labelings of the same points, sharing one pass over
/// all point pairs. Equivalent to calling silhouette() on each.
std::vector<double> silhouette_many(const nd::Matrix& points, std::span<const std::vector<int>> labelings);

}  // namespace loadguide::labeling
