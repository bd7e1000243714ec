#pragma once

#include <cstdint>
#include <span>

#include "loadguide/ndkernel/layers.hpp"

namespace loadguide::nd {

/// FNV-1a over names, shapes and the raw bytes of every parameter.
std::uint64_t checksum(std::span<const LayerParams* const> layers);

}  // namespace loadguide::nd
