#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "loadguide/data/series_frame.hpp"
#include "loadguide/data/state_profile.hpp"

namespace loadguide::labeling {

struct LabelingConfig {
  std::size_t window = 24;
  int min_states = 2;
  int max_states = 5;
  std::uint64_t seed = 0;
  int max_iter = 100;
  int restarts = 10;  // k-means seedings per candidate k
};

struct VariableScan {
  std::vector<int> k;               // candidate state counts actually fitted
  std::vector<double> silhouette;   // score per candidate
  int chosen = 0;
};

struct StateIdentification {
  data::StateProfile profile;
  std::vector<VariableScan> scans;  // one per variable
};

/// Per variable: k-means on the window embedding for every k in
/// [min_states, max_states], keeping the first k whose silhouette strictly
/// exceeds all earlier ones. Labels are renumbered by ascending centroid mean.
StateIdentification identify_states_detailed(const data::SeriesFrame& frame, const LabelingConfig& config);
data::StateProfile identify_states(const data::SeriesFrame& frame, const LabelingConfig& config);

}  // namespace loadguide::labeling
