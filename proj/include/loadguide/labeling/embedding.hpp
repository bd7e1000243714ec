#pragma once

#include <cstddef>
#include <span>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::labeling {

/// l x w window embedding of one variable. Row t is the forward window
/// X[t : t+w] while it fits; rows past l - w reuse the last full window
/// X[l-w : l], so every row contains x_t.
nd::Matrix embed_windows(std::span<const double> series, std::size_t w);

}  // namespace loadguide::labeling
