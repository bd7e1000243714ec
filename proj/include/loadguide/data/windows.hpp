#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "loadguide/data/series_frame.hpp"
#include "loadguide/data/state_profile.hpp"
#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::data {

/// One training instance with origin t: input rows [t-L, t), targets [t, t+H).
struct WindowSample {
  nd::Matrix input;       // L x D
  nd::Matrix target;      // H x D
  std::vector<int> state_target;  // H x D row-major; empty without a state profile
  std::size_t origin = 0;
};

/// Step-1 sliding windows over a frame, materialized lazily.
/// Sample k covers input rows [k, k+L) and target rows [k+L, k+L+H).
class WindowSet {
 public:
  WindowSet() = default;
  WindowSet(SeriesFrame frame, std::size_t lookback, std::size_t horizon);
  WindowSet(SeriesFrame frame, StateProfile states, std::size_t lookback, std::size_t horizon);

  std::size_t size() const { return count_; }
  std::size_t lookback() const { return lookback_; }
  std::size_t horizon() const { return horizon_; }
  std::size_t variables() const { return frame_ ? frame_->variables() : 0; }
  bool has_states() const { return static_cast<bool>(states_); }
  const std::vector<int>& state_counts() const;
  const SeriesFrame& frame() const { return *frame_; }

  nd::Matrix input(std::size_t k) const;
  nd::Matrix target(std::size_t k) const;
  std::vector<int> state_target(std::size_t k) const;
  WindowSample sample(std::size_t k) const;

 private:
  std::shared_ptr<const SeriesFrame> frame_;
  std::shared_ptr<const StateProfile> states_;
  std::size_t lookback_ = 0;
  std::size_t horizon_ = 0;
  std::size_t count_ = 0;
};

/// Materialized windows; exactly l - L - H + 1 samples.
std::vector<WindowSample> sliding_windows(const SeriesFrame& frame, const StateProfile& states, std::size_t lookback,
                                          std::size_t horizon);

}  // namespace loadguide::data
