#include "loadguide/data/series_frame.hpp"

#include <algorithm>

#include "loadguide/errors.hpp"

namespace loadguide::data {

std::vector<double> SeriesFrame::column(std::size_t variable) const {
  if (variable >= variables()) throw DimensionError("column " + std::to_string(variable) + " out of range");
  std::vector<double> out(length());
  for (std::size_t t = 0; t < length(); ++t) out[t] = values(t, variable);
  return out;
}

SeriesFrame SeriesFrame::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > length()) {
    throw DimensionError("slice [" + std::to_string(begin) + ", " + std::to_string(end) + ") of frame with " +
                         std::to_string(length()) + " rows");
  }
  SeriesFrame out;
  out.variable_names = variable_names;
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(end));
  const std::size_t d = variables();
  std::vector<double> vals(values.data().begin() + static_cast<std::ptrdiff_t>(begin * d),
                           values.data().begin() + static_cast<std::ptrdiff_t>(end * d));
  out.values = nd::Matrix(end - begin, d, std::move(vals));
  return out;
}

void SeriesFrame::validate() const {
  if (values.rows() != timestamps.size() || values.cols() != variable_names.size()) {
    throw DataError("frame values " + values.shape_string() + " inconsistent with " +
                    std::to_string(timestamps.size()) + " timestamps and " + std::to_string(variable_names.size()) +
                    " variables");
  }
  for (std::size_t t = 1; t < timestamps.size(); ++t) {
    if (timestamps[t] <= timestamps[t - 1]) {
      throw DataError("timestamps not strictly increasing at row " + std::to_string(t));
    }
  }
  if (!values.all_finite()) throw DataError("frame contains non-finite values");
}

}  // namespace loadguide::data
