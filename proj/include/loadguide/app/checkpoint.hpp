#pragma once

#include <filesystem>
#include <iosfwd>

#include "loadguide/forecaster/forecaster.hpp"
#include "loadguide/msp/msp.hpp"

namespace loadguide::app {

// Text checkpoint, version 1:
//
//   loadguide-checkpoint 1
//   model <msp|forecaster>
//   <config key> <value>            one line per configuration field
//   layers <count>
//   layer <name> <kind> <rows> <cols> <bias> <kernel_width> <in_channels> <out_channels>
//   weights <rows*cols hex floats>
//   bias <bias hex floats>
//   ...                             layer/weights/bias repeated in declared order
//   end
//
// Values are C99 hex floats (%a), so a reload is bit-exact. Layer order is
// MspModel::layers() / ForecasterModel::layers().

void save_msp(std::ostream& out, const msp::MspModel& model);
msp::MspModel load_msp(std::istream& in);
void save_msp(const std::filesystem::path& path, const msp::MspModel& model);
msp::MspModel load_msp(const std::filesystem::path& path);

void save_forecaster(std::ostream& out, const forecaster::ForecasterModel& model);
forecaster::ForecasterModel load_forecaster(std::istream& in);
void save_forecaster(const std::filesystem::path& path, const forecaster::ForecasterModel& model);
forecaster::ForecasterModel load_forecaster(const std::filesystem::path& path);

}  // namespace loadguide::app
