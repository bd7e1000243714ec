#include "loadguide/app/commands.hpp"

#include <filesystem>
#include <fstream>
#include <optional>

#include "loadguide/app/checkpoint.hpp"
#include "loadguide/data/csv.hpp"
#include "loadguide/errors.hpp"
#include "loadguide/guidance/guidance.hpp"
#include "loadguide/labeling/identify.hpp"
#include "loadguide/ndkernel/random.hpp"
#include "loadguide/synth/synth.hpp"

namespace loadguide::app {

namespace fs = std::filesystem;

namespace {

// Tags stage failures while keeping the original exception category.
template <class F>
auto in_stage(const std::string& stage, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const ConfigError& e) {
    throw ConfigError(stage + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(stage + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(stage + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(stage + ": " + e.what());
  }
}

std::string tag(std::size_t horizon) { return "h" + std::to_string(horizon); }

fs::path msp_path(const RunConfig& c, std::size_t h) { return c.checkpoint_dir / ("msp_" + tag(h) + ".ckpt"); }

fs::path forecaster_path(const RunConfig& c, const std::string& mode, std::size_t h) {
  return c.checkpoint_dir / (mode + "_" + tag(h) + ".ckpt");
}

void ensure_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

void ensure_parent(const fs::path& file) { ensure_dir(file.parent_path()); }

data::SeriesFrame load_frame(const RunConfig& config) {
  return data::align_and_downsample(data::load_csv(config.data), config.period);
}

data::WindowSet windows(const data::SeriesFrame& f, const data::StateProfile& s, const RunConfig& c, std::size_t h,
                        const char* split) {
  return in_stage(std::string("windows(") + split + ")", [&] { return data::WindowSet(f, s, c.lookback, h); });
}

}  // namespace

int exit_code_for_current_exception(const std::string& stage, std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "[" << stage << "] config error: " << e.what() << "\n";
    return exit_config;
  } catch (const NumericError& e) {
    err << "[" << stage << "] numeric failure: " << e.what() << "\n";
    return exit_numeric;
  } catch (const DimensionError& e) {
    err << "[" << stage << "] data error: " << e.what() << "\n";
    return exit_data;
  } catch (const DataError& e) {
    err << "[" << stage << "] data error: " << e.what() << "\n";
    return exit_data;
  } catch (const fs::filesystem_error& e) {
    err << "[" << stage << "] data error: " << e.what() << "\n";
    return exit_data;
  } catch (const std::exception& e) {
    err << "[" << stage << "] error: " << e.what() << "\n";
    return exit_data;
  }
}

PreparedData prepare_data(const data::SeriesFrame& frame, const data::StateProfile& states) {
  frame.validate();
  states.validate();
  if (states.timestamps != frame.timestamps) {
    throw DataError("state labels do not cover the same timestamps as the data (" + std::to_string(states.length()) +
                    " vs " + std::to_string(frame.length()) + " rows)");
  }
  if (states.variable_names != frame.variable_names) {
    throw DataError("state labels and data have different variables");
  }
  const auto split = data::split_60_20_20(frame);
  const auto points = data::split_points(frame.length());
  PreparedData out;
  out.stats = data::zscore_fit(split.train);
  out.train = data::zscore_apply(split.train, out.stats);
  out.val = data::zscore_apply(split.val, out.stats);
  out.test = data::zscore_apply(split.test, out.stats);
  out.train_states = states.slice(0, points.train_end);
  out.val_states = states.slice(points.train_end, points.val_end);
  out.test_states = states.slice(points.val_end, states.length());
  return out;
}

PreparedData prepare_data(const RunConfig& config) {
  auto frame = in_stage("load", [&] { return load_frame(config); });
  auto states = in_stage("load", [&] { return data::read_state_csv(config.states); });
  return in_stage("prepare", [&] { return prepare_data(frame, states); });
}

HorizonSeeds horizon_seeds(std::uint64_t seed, std::size_t horizon) {
  return {nd::derive_seed(seed, 1, horizon), nd::derive_seed(seed, 2, horizon), nd::derive_seed(seed, 3, horizon),
          nd::derive_seed(seed, 4, horizon)};
}

msp::MspModel fit_msp(const RunConfig& config, const PreparedData& d, std::size_t horizon, std::ostream* log) {
  const auto seeds = horizon_seeds(config.seed, horizon);
  const auto train = windows(d.train, d.train_states, config, horizon, "train");
  const auto val = windows(d.val, d.val_states, config, horizon, "val");
  return in_stage("train-msp " + tag(horizon), [&] {
    msp::MspConfig mc;
    mc.lookback = config.lookback;
    mc.horizon = horizon;
    mc.variables = train.variables();
    mc.state_counts = train.state_counts();
    mc.trunk_channels = config.trunk_channels;
    mc.ue_channels = config.ue_channels;
    mc.kernel_width = config.kernel_width;
    mc.seed = seeds.msp_init;
    auto result = msp::train_msp(msp::make_msp(mc), train, val, config.msp_train_options(seeds.msp_shuffle));
    if (log) {
      *log << "[train-msp " << tag(horizon) << "] epochs " << result.history.stopped_epoch << ", best val CE "
           << result.history.best_val_loss() << ", val state accuracy " << msp::state_accuracy(result.model, val)
           << "\n";
    }
    return std::move(result.model);
  });
}

forecaster::ForecasterModel fit_forecaster(const RunConfig& config, const PreparedData& d, std::size_t horizon,
                                           const msp::MspModel* teacher, std::ostream* log) {
  const auto seeds = horizon_seeds(config.seed, horizon);
  const auto train = windows(d.train, d.train_states, config, horizon, "train");
  const auto val = windows(d.val, d.val_states, config, horizon, "val");
  const std::string stage = std::string(teacher ? "train erkg " : "train plain ") + tag(horizon);
  return in_stage(stage, [&] {
    forecaster::ForecasterConfig fc;
    fc.kind = config.forecaster;
    fc.lookback = config.lookback;
    fc.horizon = horizon;
    fc.variables = train.variables();
    fc.hidden = config.hidden;
    fc.per_variable = config.per_variable;
    fc.seed = seeds.forecaster_init;
    auto model = forecaster::make_forecaster(fc);
    const auto options = config.train_options(seeds.forecaster_shuffle);
    auto result = teacher ? forecaster::train_with_erkg(std::move(model), *teacher, train, val,
                                                        config.guidance_config(), options)
                          : forecaster::train_plain(std::move(model), train, val, options);
    if (log) {
      *log << "[" << stage << "] epochs " << result.history.stopped_epoch << ", best val MAE "
           << result.history.best_val_loss() << "\n";
    }
    return std::move(result.model);
  });
}

metrics::HorizonMetrics evaluate_on_test(const forecaster::ForecasterModel& model, const PreparedData& d) {
  const std::size_t h = model.config.horizon;
  return in_stage("eval " + tag(h), [&] {
    const data::WindowSet test(d.test, model.config.lookback, h);
    return forecaster::evaluate(model, test, &d.stats);
  });
}

PipelineResult run_pipeline(const RunConfig& config, const PreparedData& d, std::ostream* log) {
  PipelineResult out;
  for (std::size_t h : config.horizons) {
    const auto teacher = fit_msp(config, d, h, log);
    const auto plain = fit_forecaster(config, d, h, nullptr, log);
    const auto guided = fit_forecaster(config, d, h, &teacher, log);
    out.plain.rows.push_back(evaluate_on_test(plain, d));
    out.erkg.rows.push_back(evaluate_on_test(guided, d));
    if (log) {
      *log << "[eval " << tag(h) << "] test MAE plain " << out.plain.rows.back().mae << ", erkg "
           << out.erkg.rows.back().mae << "\n";
    }
  }
  return out;
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("synth", err, [&] {
    const auto result = synth::generate(config.synth_config());
    ensure_parent(config.data);
    ensure_parent(config.truth);
    data::write_csv(config.data, result.frame);
    data::write_state_csv(config.truth, result.states);
    out << "wrote " << result.frame.length() << " rows x " << result.frame.variables() << " variables to "
        << config.data.string() << " and ground-truth states to " << config.truth.string() << "\n";
  });
}

int cmd_label(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("label", err, [&] {
    const auto frame = load_frame(config);
    const auto result = labeling::identify_states_detailed(frame, config.labeling_config());
    ensure_parent(config.states);
    data::write_state_csv(config.states, result.profile);
    for (std::size_t i = 0; i < frame.variables(); ++i) {
      const auto& scan = result.scans[i];
      out << frame.variable_names[i] << ": N=" << scan.chosen << " (silhouette";
      for (std::size_t j = 0; j < scan.k.size(); ++j) {
        out << " k=" << scan.k[j] << ":" << data::format_double(scan.silhouette[j]);
      }
      out << ")\n";
    }
    out << "wrote state labels to " << config.states.string() << "\n";
  });
}

int cmd_train_msp(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("train-msp", err, [&] {
    const auto d = prepare_data(config);
    ensure_dir(config.checkpoint_dir);
    for (std::size_t h : config.horizons) {
      const auto model = fit_msp(config, d, h, &out);
      save_msp(msp_path(config, h), model);
    }
  });
}

int cmd_train(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("train", err, [&] {
    const auto d = prepare_data(config);
    ensure_dir(config.checkpoint_dir);
    for (std::size_t h : config.horizons) {
      std::optional<msp::MspModel> teacher;
      if (config.mode == "erkg") {
        teacher = in_stage("train erkg " + tag(h), [&] { return load_msp(msp_path(config, h)); });
      }
      const auto model = fit_forecaster(config, d, h, teacher ? &*teacher : nullptr, &out);
      save_forecaster(forecaster_path(config, config.mode, h), model);
    }
  });
}

int cmd_eval(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("eval", err, [&] {
    const auto d = prepare_data(config);
    metrics::EvalReport report;
    for (std::size_t h : config.horizons) {
      const auto model = in_stage("eval " + tag(h), [&] { return load_forecaster(forecaster_path(config, config.mode, h)); });
      report.rows.push_back(evaluate_on_test(model, d));
    }
    ensure_dir(config.report_dir);
    const auto path = config.report_dir / (config.mode + ".csv");
    metrics::write_report_csv(path, report);
    out << "wrote " << path.string() << " (avg MAE " << data::format_double(report.average_mae()) << ")\n";
  });
}

int cmd_compare(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("compare", err, [&] {
    const auto plain = metrics::read_report_csv(config.report_dir / "plain.csv");
    const auto erkg = metrics::read_report_csv(config.report_dir / "erkg.csv");
    const auto path = config.report_dir / "comparison.csv";
    metrics::write_comparison_csv(path, plain, erkg);
    const auto imp = metrics::percent_improvement(plain, erkg);
    out << "MAE improvement " << data::format_double(imp.mae_pct) << "%, MAPE' improvement "
        << data::format_double(imp.mape_pct) << "%\n";
  });
}

int cmd_pipeline(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded("pipeline", err, [&] {
    const auto d = prepare_data(config);
    const auto result = run_pipeline(config, d, &out);
    ensure_dir(config.report_dir);
    metrics::write_report_csv(config.report_dir / "plain.csv", result.plain);
    metrics::write_report_csv(config.report_dir / "erkg.csv", result.erkg);
    metrics::write_comparison_csv(config.report_dir / "comparison.csv", result.plain, result.erkg);
    {
      std::ofstream echo(config.report_dir / "config_echo.txt");
      echo << config.echo();
      if (!echo) throw DataError("cannot write " + (config.report_dir / "config_echo.txt").string());
    }
    const auto imp = metrics::percent_improvement(result.plain, result.erkg);
    out << "MAE improvement " << data::format_double(imp.mae_pct) << "%, MAPE' improvement "
        << data::format_double(imp.mape_pct) << "%\n";
  });
}

}  // namespace loadguide::app
