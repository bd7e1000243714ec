#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loadguide/app/commands.hpp"
#include "loadguide/app/run_config.hpp"
#include "loadguide/errors.hpp"

namespace app = loadguide::app;

namespace {

struct CommonFlags {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<std::string> data, truth, states, checkpoint_dir, report_dir, mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config_file, "key = value config file");
  cmd->add_option("-s,--set", f.sets, "override a config key (KEY=VALUE), repeatable");
  cmd->add_option("--data", f.data, "load CSV");
  cmd->add_option("--truth", f.truth, "ground-truth state CSV written by synth");
  cmd->add_option("--states", f.states, "state label CSV");
  cmd->add_option("--checkpoint-dir", f.checkpoint_dir, "checkpoint directory");
  cmd->add_option("--report-dir", f.report_dir, "report directory");
  cmd->add_option("--mode", f.mode, "plain or erkg");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--alpha", f.alpha, "guidance weight");
}

std::vector<std::pair<std::string, std::string>> overrides(const CommonFlags& f) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw loadguide::ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto put = [&](const char* key, const auto& value) {
    if (!value) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, std::string>) out.emplace_back(key, *value);
    else out.emplace_back(key, std::to_string(*value));
  };
  put("data", f.data);
  put("truth", f.truth);
  put("states", f.states);
  put("checkpoint_dir", f.checkpoint_dir);
  put("report_dir", f.report_dir);
  put("mode", f.mode);
  put("seed", f.seed);
  if (f.alpha) out.emplace_back("alpha", CLI::detail::to_string(*f.alpha));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Residential load forecasting with event-response guidance"};
  cli.require_subcommand(1);

  using Command = int (*)(const app::RunConfig&, std::ostream&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"synth", "generate a synthetic household and its ground-truth states", app::cmd_synth},
      {"label", "identify appliance states by clustering", app::cmd_label},
      {"train-msp", "train the state predictor for every horizon", app::cmd_train_msp},
      {"train", "train forecasters (mode plain or erkg)", app::cmd_train},
      {"eval", "evaluate trained forecasters on the test split", app::cmd_eval},
      {"compare", "compare plain and erkg reports", app::cmd_compare},
      {"pipeline", "train and evaluate plain and erkg forecasters for every horizon", app::cmd_pipeline},
  };

  std::vector<CommonFlags> flags(commands.size());
  std::vector<CLI::App*> subs;
  bool print_config = false;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = cli.add_subcommand(std::get<0>(commands[i]), std::get<1>(commands[i]));
    add_common(sub, flags[i]);
    sub->add_flag("--print-config", print_config, "print the effective configuration and exit");
    subs.push_back(sub);
  }

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : app::exit_config;
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    const std::string name = std::get<0>(commands[i]);
    app::RunConfig config;
    const int status = app::guarded(name, std::cerr, [&] {
      const std::filesystem::path file = flags[i].config_file;
      config = app::resolve_config(flags[i].config_file.empty() ? nullptr : &file, overrides(flags[i]));
    });
    if (status != app::exit_ok) return status;
    if (print_config) {
      std::cout << config.echo();
      return app::exit_ok;
    }
    return std::get<2>(commands[i])(config, std::cout, std::cerr);
  }
  return app::exit_config;
}
