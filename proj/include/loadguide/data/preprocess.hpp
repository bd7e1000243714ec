#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "loadguide/data/series_frame.hpp"

namespace loadguide::data {

/// Joins meters onto a common clock: keeps the intersection of their time
/// ranges and only timestamps present in every frame. Columns concatenate in order.
SeriesFrame align_frames(std::span<const SeriesFrame> frames);

/// Averages values into left-anchored buckets [t0 + k*P, t0 + (k+1)*P).
/// A trailing bucket not fully covered by the native sampling interval is dropped;
/// buckets without any reading are skipped. Output timestamps are bucket starts.
SeriesFrame align_and_downsample(const SeriesFrame& frame, std::int64_t period_seconds = 3600);

struct SplitPoints {
  std::size_t train_end = 0;
  std::size_t val_end = 0;
};

/// Chronological 60/20/20 boundaries: floor(0.6 l) and floor(0.8 l). Requires l >= 5.
SplitPoints split_points(std::size_t length);

struct FrameSplit {
  SeriesFrame train;
  SeriesFrame val;
  SeriesFrame test;
};

FrameSplit split_60_20_20(const SeriesFrame& frame);

inline constexpr double kStdFloor = 1e-8;

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;  // population std; clamped to kStdFloor when applied

  double effective_std(std::size_t i) const { return std[i] < kStdFloor ? kStdFloor : std[i]; }
};

NormStats zscore_fit(const SeriesFrame& train);
SeriesFrame zscore_apply(const SeriesFrame& frame, const NormStats& stats);
SeriesFrame zscore_invert(const SeriesFrame& frame, const NormStats& stats);

}  // namespace loadguide::data
