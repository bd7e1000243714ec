#include "loadguide/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "loadguide/errors.hpp"

namespace loadguide::data {

SeriesFrame align_frames(std::span<const SeriesFrame> frames) {
  if (frames.empty()) throw DataError("align_frames: no frames");
  std::int64_t start = std::numeric_limits<std::int64_t>::min();
  std::int64_t end = std::numeric_limits<std::int64_t>::max();
  for (const auto& f : frames) {
    if (f.length() == 0) throw DataError("align_frames: empty frame");
    start = std::max(start, f.timestamps.front());
    end = std::min(end, f.timestamps.back());
  }

  SeriesFrame out;
  for (const auto& f : frames)
    out.variable_names.insert(out.variable_names.end(), f.variable_names.begin(), f.variable_names.end());
  const std::size_t d = out.variable_names.size();

  // Merge walk over sorted timestamp lists.
  std::vector<std::size_t> cursor(frames.size(), 0);
  std::vector<double> vals;
  const auto& base = frames[0];
  for (std::size_t r = 0; r < base.length(); ++r) {
    const std::int64_t ts = base.timestamps[r];
    if (ts < start || ts > end) continue;
    bool everywhere = true;
    for (std::size_t f = 1; f < frames.size() && everywhere; ++f) {
      auto& c = cursor[f];
      const auto& stamps = frames[f].timestamps;
      while (c < stamps.size() && stamps[c] < ts) ++c;
      everywhere = c < stamps.size() && stamps[c] == ts;
    }
    if (!everywhere) continue;
    out.timestamps.push_back(ts);
    for (std::size_t i = 0; i < base.variables(); ++i) vals.push_back(base.values(r, i));
    for (std::size_t f = 1; f < frames.size(); ++f)
      for (std::size_t i = 0; i < frames[f].variables(); ++i) vals.push_back(frames[f].values(cursor[f], i));
  }
  if (out.timestamps.empty()) throw DataError("align_frames: frames share no timestamps");
  out.values = nd::Matrix(out.timestamps.size(), d, std::move(vals));
  return out;
}

SeriesFrame align_and_downsample(const SeriesFrame& frame, std::int64_t period_seconds) {
  if (frame.length() == 0) throw DataError("align_and_downsample: empty frame");
  if (period_seconds <= 0) throw ConfigError("downsample period must be positive");
  std::int64_t native = std::numeric_limits<std::int64_t>::max();
  for (std::size_t t = 1; t < frame.length(); ++t)
    native = std::min(native, frame.timestamps[t] - frame.timestamps[t - 1]);
  if (frame.length() == 1) native = period_seconds;
  if (period_seconds < native) {
    throw ConfigError("downsample period " + std::to_string(period_seconds) + "s is shorter than the native interval " +
                      std::to_string(native) + "s");
  }

  const std::size_t d = frame.variables();
  const std::int64_t t0 = frame.timestamps.front();
  const std::int64_t covered_until = frame.timestamps.back() + native;

  SeriesFrame out;
  out.variable_names = frame.variable_names;
  std::vector<double> vals;
  std::vector<double> sum(d);
  std::size_t r = 0;
  for (std::int64_t bucket_start = t0; bucket_start + period_seconds <= covered_until; bucket_start += period_seconds) {
    const std::int64_t bucket_end = bucket_start + period_seconds;
    std::fill(sum.begin(), sum.end(), 0.0);
    std::size_t count = 0;
    while (r < frame.length() && frame.timestamps[r] < bucket_end) {
      for (std::size_t i = 0; i < d; ++i) sum[i] += frame.values(r, i);
      ++count;
      ++r;
    }
    if (count == 0) continue;
    out.timestamps.push_back(bucket_start);
    for (std::size_t i = 0; i < d; ++i) vals.push_back(sum[i] / static_cast<double>(count));
  }
  if (out.timestamps.empty()) throw DataError("align_and_downsample: series shorter than one period");
  out.values = nd::Matrix(out.timestamps.size(), d, std::move(vals));
  return out;
}

SplitPoints split_points(std::size_t length) {
  if (length < 5) throw DataError("60/20/20 split needs at least 5 rows, got " + std::to_string(length));
  return {length * 6 / 10, length * 8 / 10};
}

FrameSplit split_60_20_20(const SeriesFrame& frame) {
  const auto sp = split_points(frame.length());
  return {frame.slice(0, sp.train_end), frame.slice(sp.train_end, sp.val_end), frame.slice(sp.val_end, frame.length())};
}

NormStats zscore_fit(const SeriesFrame& train) {
  const std::size_t l = train.length(), d = train.variables();
  if (l == 0) throw DataError("zscore_fit: empty training frame");
  NormStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  const auto n = static_cast<double>(l);
  for (std::size_t i = 0; i < d; ++i) {
    double m = 0.0;
    for (std::size_t t = 0; t < l; ++t) m += train.values(t, i);
    m /= n;
    // second pass corrects rounding in the mean so constant columns get their exact value
    double correction = 0.0;
    for (std::size_t t = 0; t < l; ++t) correction += train.values(t, i) - m;
    m += correction / n;
    double ss = 0.0;
    for (std::size_t t = 0; t < l; ++t) {
      const double dev = train.values(t, i) - m;
      ss += dev * dev;
    }
    stats.mean[i] = m;
    stats.std[i] = std::sqrt(ss / n);
  }
  return stats;
}

namespace {

void check_stats(const SeriesFrame& frame, const NormStats& stats) {
  if (stats.mean.size() != frame.variables() || stats.std.size() != frame.variables()) {
    throw DimensionError("normalization stats for " + std::to_string(stats.mean.size()) +
                         " variables applied to frame with " + std::to_string(frame.variables()));
  }
}

}  // namespace

SeriesFrame zscore_apply(const SeriesFrame& frame, const NormStats& stats) {
  check_stats(frame, stats);
  SeriesFrame out = frame;
  for (std::size_t t = 0; t < out.length(); ++t)
    for (std::size_t i = 0; i < out.variables(); ++i)
      out.values(t, i) = (frame.values(t, i) - stats.mean[i]) / stats.effective_std(i);
  return out;
}

SeriesFrame zscore_invert(const SeriesFrame& frame, const NormStats& stats) {
  check_stats(frame, stats);
  SeriesFrame out = frame;
  for (std::size_t t = 0; t < out.length(); ++t)
    for (std::size_t i = 0; i < out.variables(); ++i)
      out.values(t, i) = frame.values(t, i) * stats.effective_std(i) + stats.mean[i];
  return out;
}

}  // namespace loadguide::data
