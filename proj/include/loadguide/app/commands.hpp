#pragma once

#include <ostream>
#include <string>

#include "loadguide/app/run_config.hpp"
#include "loadguide/data/preprocess.hpp"
#include "loadguide/data/series_frame.hpp"
#include "loadguide/data/state_profile.hpp"
#include "loadguide/data/windows.hpp"
#include "loadguide/forecaster/forecaster.hpp"
#include "loadguide/metrics/metrics.hpp"
#include "loadguide/msp/msp.hpp"

namespace loadguide::app {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_data = 3, exit_numeric = 4 };

/// Normalized chronological splits with aligned state labels.
struct PreparedData {
  data::NormStats stats;
  data::SeriesFrame train, val, test;
  data::StateProfile train_states, val_states, test_states;
};

/// Splits 60/20/20, fits z-score on the train split and applies it to all three.
/// `states` must share the frame's timestamps and variables.
PreparedData prepare_data(const data::SeriesFrame& frame, const data::StateProfile& states);

/// Loads config.data (downsampled to config.period) and config.states.
PreparedData prepare_data(const RunConfig& config);

struct HorizonSeeds {
  std::uint64_t msp_init;
  std::uint64_t msp_shuffle;
  std::uint64_t forecaster_init;
  std::uint64_t forecaster_shuffle;
};

/// Seeds for one horizon; plain and guided runs share the forecaster seeds.
HorizonSeeds horizon_seeds(std::uint64_t seed, std::size_t horizon);

msp::MspModel fit_msp(const RunConfig& config, const PreparedData& data, std::size_t horizon, std::ostream* log = nullptr);
forecaster::ForecasterModel fit_forecaster(const RunConfig& config, const PreparedData& data, std::size_t horizon,
                                           const msp::MspModel* teacher, std::ostream* log = nullptr);
metrics::HorizonMetrics evaluate_on_test(const forecaster::ForecasterModel& model, const PreparedData& data);

struct PipelineResult {
  metrics::EvalReport plain;
  metrics::EvalReport erkg;
};

/// For every horizon: teacher, plain forecaster, guided forecaster, test metrics.
PipelineResult run_pipeline(const RunConfig& config, const PreparedData& data, std::ostream* log = nullptr);

/// Command entry points. Each catches its own failures, prints a
/// "[stage] error: ..." line to `err`, and returns the exit code.
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_label(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train_msp(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Runs `body`, mapping ConfigError to 2, DataError/DimensionError to 3 and
/// NumericError to 4, with the diagnostic tagged by `stage`.
template <class F>
int guarded(const std::string& stage, std::ostream& err, F&& body);

int exit_code_for_current_exception(const std::string& stage, std::ostream& err);

template <class F>
int guarded(const std::string& stage, std::ostream& err, F&& body) {
  try {
    body();
    return exit_ok;
  } catch (...) {
    return exit_code_for_current_exception(stage, err);
  }
}

}  // namespace loadguide::app
