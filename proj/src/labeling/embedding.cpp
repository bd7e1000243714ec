#include "loadguide/labeling/embedding.hpp"

#include <algorithm>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::labeling {

nd::Matrix embed_windows(std::span<const double> series, std::size_t w) {
  const std::size_t l = series.size();
  if (w == 0) throw ConfigError("window size w must be >= 1");
  if (w > l) {
    throw DataError("window size w = " + std::to_string(w) + " exceeds series length l = " + std::to_string(l));
  }
  nd::Matrix e(l, w);
  for (std::size_t t = 0; t < l; ++t) {
    const std::size_t start = std::min(t, l - w);
    std::copy_n(series.begin() + static_cast<std::ptrdiff_t>(start), w, e.row(t).begin());
  }
  return e;
}

}  // namespace loadguide::labeling
