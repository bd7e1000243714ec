#include "loadguide/labeling/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::labeling {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

// Assigns each point to its nearest centroid (lowest index on ties); returns inertia.
double assign_all(const nd::Matrix& points, const nd::Matrix& centroids, std::vector<int>& assign,
                  std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = 0;
    for (std::size_t c = 0; c < centroids.rows(); ++c) {
      const double d = squared_distance(points.row(i), centroids.row(c));
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    assign[i] = best_c;
    dist[i] = best;
    inertia += best;
  }
  return inertia;
}

nd::Matrix plus_plus_init(const nd::Matrix& points, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = points.rows(), w = points.cols();
  nd::Matrix centroids(k, w);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t first = pick(rng);
  std::copy(points.row(first).begin(), points.row(first).end(), centroids.row(0).begin());
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points.row(i), centroids.row(0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double run = 0.0;
      chosen = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += d2[i];
        if (run > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // guard against landing on an existing centroid through rounding at the tail
      while (d2[chosen] == 0.0 && chosen > 0) --chosen;
    }
    std::copy(points.row(chosen).begin(), points.row(chosen).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points.row(i), centroids.row(c)));
  }
  return centroids;
}

}  // namespace

std::size_t count_distinct_rows(const nd::Matrix& points) {
  std::vector<std::size_t> order(points.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(points.row(a).begin(), points.row(a).end(), points.row(b).begin(),
                                        points.row(b).end());
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = order.empty() ? 0 : 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

namespace {

KMeansResult lloyd(const nd::Matrix& points, std::size_t k, std::uint64_t seed, int max_iter) {
  const std::size_t n = points.rows(), w = points.cols();
  std::mt19937_64 rng(seed);
  KMeansResult r;
  r.centroids = plus_plus_init(points, k, rng);
  r.assignments.assign(n, 0);
  std::vector<double> dist(n);
  r.inertia_history.push_back(assign_all(points, r.centroids, r.assignments, dist));

  std::vector<int> next(n);
  std::vector<std::size_t> members(k);
  for (int iter = 0; iter < max_iter; ++iter) {
    // update step: centroids become member means
    nd::Matrix sums(k, w);
    std::fill(members.begin(), members.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.assignments[i]);
      ++members[c];
      auto dst = sums.row(c);
      auto src = points.row(i);
      for (std::size_t j = 0; j < w; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (members[c] == 0) {
        const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        std::copy(points.row(far).begin(), points.row(far).end(), r.centroids.row(c).begin());
        dist[far] = 0.0;
        continue;
      }
      const double inv = 1.0 / static_cast<double>(members[c]);
      for (std::size_t j = 0; j < w; ++j) r.centroids(c, j) = sums(c, j) * inv;
    }

    r.inertia_history.push_back(assign_all(points, r.centroids, next, dist));
    r.iterations = iter + 1;
    const bool stable = next == r.assignments;
    r.assignments.swap(next);
    if (stable) break;
  }
  r.inertia = r.inertia_history.back();
  return r;
}

}  // namespace

KMeansResult kmeans(const nd::Matrix& points, std::size_t k, std::uint64_t seed, int max_iter, int restarts) {
  if (k < 1) throw ConfigError("kmeans: k must be >= 1");
  if (restarts < 1) throw ConfigError("kmeans: restarts must be >= 1");
  const std::size_t distinct = count_distinct_rows(points);
  if (k > distinct) {
    throw DataError("kmeans: k = " + std::to_string(k) + " exceeds the " + std::to_string(distinct) +
                    " distinct points");
  }
  KMeansResult best = lloyd(points, k, seed, max_iter);
  for (int r = 1; r < restarts; ++r) {
    KMeansResult next = lloyd(points, k, nd::derive_seed(seed, static_cast<std::uint64_t>(r)), max_iter);
    if (next.inertia < best.inertia) best = std::move(next);
  }
  return best;
}

}  // namespace loadguide::labeling
