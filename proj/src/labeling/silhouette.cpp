#include "loadguide/labeling/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::labeling {

namespace {

struct Labeling {
  const std::vector<int>* labels;
  std::size_t clusters;
  std::vector<std::size_t> sizes;
  std::vector<double> sums;  // n x clusters: summed distance from point i to cluster c
};

Labeling prepare(std::span<const int> labels, std::size_t n, const std::vector<int>* owner) {
  if (labels.size() != n) {
    throw DimensionError("silhouette: " + std::to_string(labels.size()) + " labels for " + std::to_string(n) +
                         " points");
  }
  int top = -1;
  for (int c : labels) {
    if (c < 0) throw DataError("silhouette: negative cluster label");
    top = std::max(top, c);
  }
  Labeling lab{owner, static_cast<std::size_t>(top + 1), {}, {}};
  lab.sizes.assign(lab.clusters, 0);
  for (int c : labels) ++lab.sizes[static_cast<std::size_t>(c)];
  const auto nonempty = std::count_if(lab.sizes.begin(), lab.sizes.end(), [](std::size_t s) { return s > 0; });
  if (nonempty < 2) throw DataError("silhouette needs at least 2 non-empty clusters");
  lab.sums.assign(n * lab.clusters, 0.0);
  return lab;
}

double score(const Labeling& lab, std::span<const int> labels) {
  const std::size_t n = labels.size();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto own = static_cast<std::size_t>(labels[i]);
    if (lab.sizes[own] <= 1) continue;
    const double* s = lab.sums.data() + i * lab.clusters;
    const double a = s[own] / static_cast<double>(lab.sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < lab.clusters; ++c) {
      if (c == own || lab.sizes[c] == 0) continue;
      b = std::min(b, s[c] / static_cast<double>(lab.sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(n);
}

}  // namespace

std::vector<double> silhouette_many(const nd::Matrix& points, std::span<const std::vector<int>> labelings) {
  const std::size_t n = points.rows(), w = points.cols();
  std::vector<Labeling> labs;
  labs.reserve(labelings.size());
  for (const auto& l : labelings) labs.push_back(prepare(l, n, &l));

  for (std::size_t i = 0; i < n; ++i) {
    const double* pi = points.row(i).data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const double* pj = points.row(j).data();
      double d2 = 0.0;
      for (std::size_t q = 0; q < w; ++q) {
        const double diff = pi[q] - pj[q];
        d2 += diff * diff;
      }
      const double d = std::sqrt(d2);
      for (auto& lab : labs) {
        const auto& lbl = *lab.labels;
        lab.sums[i * lab.clusters + static_cast<std::size_t>(lbl[j])] += d;
        lab.sums[j * lab.clusters + static_cast<std::size_t>(lbl[i])] += d;
      }
    }
  }

  std::vector<double> scores;
  scores.reserve(labs.size());
  for (std::size_t q = 0; q < labs.size(); ++q) scores.push_back(score(labs[q], labelings[q]));
  return scores;
}

double silhouette(const nd::Matrix& points, std::span<const int> assignments) {
  std::vector<std::vector<int>> one{std::vector<int>(assignments.begin(), assignments.end())};
  return silhouette_many(points, one).front();
}

}  // namespace loadguide::labeling
