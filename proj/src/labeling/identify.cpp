#include "loadguide/labeling/identify.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "loadguide/errors.hpp"
#include "loadguide/labeling/embedding.hpp"
#include "loadguide/labeling/kmeans.hpp"
#include "loadguide/labeling/silhouette.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::labeling {

namespace {

// Renumbers cluster ids so that centroid means ascend with the id.
std::vector<int> canonical_labels(const KMeansResult& fit) {
  const std::size_t k = fit.centroids.rows();
  std::vector<double> means(k);
  for (std::size_t c = 0; c < k; ++c) {
    const auto row = fit.centroids.row(c);
    means[c] = std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(row.size());
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means[static_cast<std::size_t>(a)] < means[static_cast<std::size_t>(b)]; });
  std::vector<int> rank(k);
  for (std::size_t r = 0; r < k; ++r) rank[static_cast<std::size_t>(order[r])] = static_cast<int>(r);
  std::vector<int> out(fit.assignments.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rank[static_cast<std::size_t>(fit.assignments[i])];
  return out;
}

}  // namespace

StateIdentification identify_states_detailed(const data::SeriesFrame& frame, const LabelingConfig& config) {
  if (config.min_states < 2) throw ConfigError("min_s must be >= 2");
  if (config.max_states < config.min_states) throw ConfigError("max_s must be >= min_s");
  const std::size_t l = frame.length(), d = frame.variables();
  if (config.window > l) {
    throw DataError("window size w = " + std::to_string(config.window) + " exceeds series length l = " +
                    std::to_string(l));
  }

  StateIdentification out;
  out.profile.timestamps = frame.timestamps;
  out.profile.variable_names = frame.variable_names;
  out.profile.labels.assign(l * d, 0);
  out.profile.counts.assign(d, 0);

  for (std::size_t i = 0; i < d; ++i) {
    const auto series = frame.column(i);
    const nd::Matrix embedding = embed_windows(series, config.window);
    const std::size_t distinct = count_distinct_rows(embedding);
    if (distinct < static_cast<std::size_t>(config.min_states)) {
      throw DataError("variable '" + frame.variable_names[i] + "' has " + std::to_string(distinct) +
                      " distinct windows, fewer than min_s = " + std::to_string(config.min_states));
    }

    VariableScan scan;
    std::vector<std::vector<int>> labelings;
    for (int k = config.min_states; k <= config.max_states; ++k) {
      if (static_cast<std::size_t>(k) > distinct) break;
      const auto fit = kmeans(embedding, static_cast<std::size_t>(k), nd::derive_seed(config.seed, i, static_cast<std::uint64_t>(k)),
                              config.max_iter, config.restarts);
      scan.k.push_back(k);
      labelings.push_back(canonical_labels(fit));
    }
    scan.silhouette = silhouette_many(embedding, labelings);

    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_q = 0;
    for (std::size_t q = 0; q < scan.k.size(); ++q) {
      if (scan.silhouette[q] > best) {
        best = scan.silhouette[q];
        best_q = q;
      }
    }
    scan.chosen = scan.k[best_q];
    out.profile.counts[i] = scan.chosen;
    for (std::size_t t = 0; t < l; ++t) out.profile.label(t, i) = labelings[best_q][t];
    out.scans.push_back(std::move(scan));
  }
  return out;
}

data::StateProfile identify_states(const data::SeriesFrame& frame, const LabelingConfig& config) {
  return identify_states_detailed(frame, config).profile;
}

}  // namespace loadguide::labeling
