#include "loadguide/data/windows.hpp"

#include <algorithm>

#include "loadguide/errors.hpp"

namespace loadguide::data {

namespace {

std::size_t window_count(std::size_t length, std::size_t lookback, std::size_t horizon) {
  if (lookback == 0 || horizon == 0) throw ConfigError("lookback and horizon must be >= 1");
  if (length < lookback + horizon) {
    throw DataError("series of length " + std::to_string(length) + " too short for windows: need at least L + H = " +
                    std::to_string(lookback + horizon));
  }
  return length - lookback - horizon + 1;
}

nd::Matrix rows_of(const SeriesFrame& f, std::size_t begin, std::size_t count) {
  const std::size_t d = f.variables();
  const auto first = f.values.data().begin() + static_cast<std::ptrdiff_t>(begin * d);
  return nd::Matrix(count, d, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(count * d)));
}

}  // namespace

WindowSet::WindowSet(SeriesFrame frame, std::size_t lookback, std::size_t horizon)
    : lookback_(lookback), horizon_(horizon) {
  count_ = window_count(frame.length(), lookback, horizon);
  frame_ = std::make_shared<const SeriesFrame>(std::move(frame));
}

WindowSet::WindowSet(SeriesFrame frame, StateProfile states, std::size_t lookback, std::size_t horizon)
    : WindowSet(std::move(frame), lookback, horizon) {
  if (states.length() != frame_->length() || states.variables() != frame_->variables()) {
    throw DimensionError("state profile " + std::to_string(states.length()) + "x" +
                         std::to_string(states.variables()) + " does not match frame " +
                         frame_->values.shape_string());
  }
  states_ = std::make_shared<const StateProfile>(std::move(states));
}

const std::vector<int>& WindowSet::state_counts() const {
  if (!states_) throw DataError("window set has no state profile");
  return states_->counts;
}

nd::Matrix WindowSet::input(std::size_t k) const { return rows_of(*frame_, k, lookback_); }

nd::Matrix WindowSet::target(std::size_t k) const { return rows_of(*frame_, k + lookback_, horizon_); }

std::vector<int> WindowSet::state_target(std::size_t k) const {
  if (!states_) throw DataError("window set has no state profile");
  const std::size_t d = states_->variables();
  const auto first = states_->labels.begin() + static_cast<std::ptrdiff_t>((k + lookback_) * d);
  return std::vector<int>(first, first + static_cast<std::ptrdiff_t>(horizon_ * d));
}

WindowSample WindowSet::sample(std::size_t k) const {
  if (k >= count_) throw DimensionError("window index " + std::to_string(k) + " out of range");
  WindowSample s{input(k), target(k), {}, k + lookback_};
  if (states_) s.state_target = state_target(k);
  return s;
}

std::vector<WindowSample> sliding_windows(const SeriesFrame& frame, const StateProfile& states, std::size_t lookback,
                                          std::size_t horizon) {
  WindowSet set(frame, states, lookback, horizon);
  std::vector<WindowSample> out;
  out.reserve(set.size());
  for (std::size_t k = 0; k < set.size(); ++k) out.push_back(set.sample(k));
  return out;
}

}  // namespace loadguide::data
