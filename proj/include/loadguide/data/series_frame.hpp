#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::data {

/// Timestamped l x D load matrix. Timestamps are epoch seconds, strictly increasing.
struct SeriesFrame {
  std::vector<std::int64_t> timestamps;
  nd::Matrix values;
  std::vector<std::string> variable_names;

  std::size_t length() const { return timestamps.size(); }
  std::size_t variables() const { return variable_names.size(); }

  std::vector<double> column(std::size_t variable) const;
  /// Rows [begin, end).
  SeriesFrame slice(std::size_t begin, std::size_t end) const;
  /// Throws DataError when any invariant is broken.
  void validate() const;

  friend bool operator==(const SeriesFrame&, const SeriesFrame&) = default;
};

}  // namespace loadguide::data
