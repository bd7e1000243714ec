#include "loadguide/app/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "loadguide/data/csv.hpp"
#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::app {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (value.empty() || ec != std::errc() || ptr != last) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a valid number");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config key '" + key + "': '" + value + "' is not a boolean");
}

template <class T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::istringstream is(value);
  for (std::string item; std::getline(is, item, ',');) out.push_back(parse_number<T>(key, trim(item)));
  return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) out += data::format_double(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

synth::ApplianceSpec& appliance(std::vector<synth::ApplianceSpec>& list, const std::string& name) {
  auto it = std::find_if(list.begin(), list.end(), [&](const auto& a) { return a.name == name; });
  if (it != list.end()) return *it;
  list.push_back({name, {}, {}, std::nullopt});
  return list.back();
}

}  // namespace

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "data") data = value;
  else if (key == "truth") truth = value;
  else if (key == "states") states = value;
  else if (key == "checkpoint_dir") checkpoint_dir = value;
  else if (key == "report_dir") report_dir = value;
  else if (key == "period") period = parse_number<std::int64_t>(key, value);
  else if (key == "w") w = parse_number<std::size_t>(key, value);
  else if (key == "min_s") min_s = parse_number<int>(key, value);
  else if (key == "restarts") restarts = parse_number<int>(key, value);
  else if (key == "max_s") max_s = parse_number<int>(key, value);
  else if (key == "lookback") lookback = parse_number<std::size_t>(key, value);
  else if (key == "horizons") horizons = parse_list<std::size_t>(key, value);
  else if (key == "lr") lr = parse_number<double>(key, value);
  else if (key == "batch") batch = parse_number<std::size_t>(key, value);
  else if (key == "patience") patience = parse_number<int>(key, value);
  else if (key == "max_epochs") max_epochs = parse_number<int>(key, value);
  else if (key == "msp_max_epochs") msp_max_epochs = parse_number<int>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "alpha") alpha = parse_number<double>(key, value);
  else if (key == "weight_mode") weight_mode = guidance::weight_mode_from_string(value);
  else if (key == "mode") {
    if (value != "plain" && value != "erkg") throw ConfigError("config key 'mode' must be plain or erkg");
    mode = value;
  } else if (key == "forecaster") forecaster = forecaster::forecaster_kind_from_string(value);
  else if (key == "hidden") hidden = parse_number<std::size_t>(key, value);
  else if (key == "per_variable") per_variable = parse_bool(key, value);
  else if (key == "trunk_channels") trunk_channels = parse_number<std::size_t>(key, value);
  else if (key == "ue_channels") ue_channels = parse_number<std::size_t>(key, value);
  else if (key == "kernel_width") kernel_width = parse_number<std::size_t>(key, value);
  else if (key == "length") length = parse_number<std::size_t>(key, value);
  else if (key == "noise_sigma") noise_sigma = parse_number<double>(key, value);
  else if (key == "spike_rate") spike_rate = parse_number<double>(key, value);
  else if (key == "household_total") household_total = parse_bool(key, value);
  else if (key.rfind("appliance.", 0) == 0) {
    const auto dot = key.rfind('.');
    const std::string name = key.substr(10, dot > 10 ? dot - 10 : 0);
    const std::string field = key.substr(dot + 1);
    if (name.empty() || dot <= 10) throw ConfigError("config key '" + key + "' must be appliance.<name>.<field>");
    auto& spec = appliance(appliances, name);
    if (field == "levels") spec.levels = parse_list<double>(key, value);
    else if (field == "dwell") spec.dwell_means = parse_list<double>(key, value);
    else if (field == "trigger") {
      // source,source_state,lag,probability[,target_state]
      std::vector<std::string> parts;
      std::istringstream is(value);
      for (std::string p; std::getline(is, p, ',');) parts.push_back(trim(p));
      if (parts.size() != 4 && parts.size() != 5)
        throw ConfigError("config key '" + key + "' expects source,source_state,lag,probability[,target_state]");
      synth::Trigger t;
      t.source = parts[0];
      t.source_state = parse_number<int>(key, parts[1]);
      t.lag = parse_number<std::size_t>(key, parts[2]);
      t.probability = parse_number<double>(key, parts[3]);
      if (parts.size() == 5) t.target_state = parse_number<int>(key, parts[4]);
      spec.trigger = t;
    } else {
      throw ConfigError("unknown appliance field '" + field + "' in '" + key + "'");
    }
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::validate() const {
  if (period < 1) throw ConfigError("period must be >= 1 second");
  if (w < 1) throw ConfigError("w must be >= 1");
  if (min_s < 2 || max_s < min_s) throw ConfigError("state range needs 2 <= min_s <= max_s");
  if (max_s > 5) throw ConfigError("max_s must be <= 5");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (lookback < 1) throw ConfigError("lookback must be >= 1");
  if (horizons.empty()) throw ConfigError("horizons must not be empty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw ConfigError("horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1]) throw ConfigError("horizons must be strictly ascending");
  }
  if (kernel_width > 2 * lookback + 1) throw ConfigError("lookback too short for the MSP kernel width");
  if (!(lr >= 0.0)) throw ConfigError("lr must be >= 0");
  if (batch < 1) throw ConfigError("batch must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (msp_max_epochs < 0) throw ConfigError("msp_max_epochs must be >= 0");
  guidance_config().validate();
}

std::string RunConfig::echo() const {
  std::map<std::string, std::string> kv{
      {"data", data.string()},
      {"truth", truth.string()},
      {"states", states.string()},
      {"checkpoint_dir", checkpoint_dir.string()},
      {"report_dir", report_dir.string()},
      {"period", std::to_string(period)},
      {"w", std::to_string(w)},
      {"min_s", std::to_string(min_s)},
      {"restarts", std::to_string(restarts)},
      {"max_s", std::to_string(max_s)},
      {"lookback", std::to_string(lookback)},
      {"horizons", join(horizons)},
      {"lr", data::format_double(lr)},
      {"batch", std::to_string(batch)},
      {"patience", std::to_string(patience)},
      {"max_epochs", std::to_string(max_epochs)},
      {"msp_max_epochs", std::to_string(msp_max_epochs)},
      {"seed", std::to_string(seed)},
      {"alpha", data::format_double(alpha)},
      {"weight_mode", guidance::to_string(weight_mode)},
      {"mode", mode},
      {"forecaster", forecaster::to_string(forecaster)},
      {"hidden", std::to_string(hidden)},
      {"per_variable", per_variable ? "true" : "false"},
      {"trunk_channels", std::to_string(trunk_channels)},
      {"ue_channels", std::to_string(ue_channels)},
      {"kernel_width", std::to_string(kernel_width)},
      {"length", std::to_string(length)},
      {"noise_sigma", data::format_double(noise_sigma)},
      {"spike_rate", data::format_double(spike_rate)},
      {"household_total", household_total ? "true" : "false"},
      {"split", "60/20/20"},
      {"metrics_scale", "zscore(train)"},
  };
  for (const auto& a : appliances) {
    kv["appliance." + a.name + ".levels"] = join(a.levels);
    kv["appliance." + a.name + ".dwell"] = join(a.dwell_means);
    if (a.trigger) {
      const auto& t = *a.trigger;
      kv["appliance." + a.name + ".trigger"] = t.source + "," + std::to_string(t.source_state) + "," +
                                               std::to_string(t.lag) + "," + data::format_double(t.probability) + "," +
                                               std::to_string(t.target_state);
    }
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

TrainOptions RunConfig::train_options(std::uint64_t stream_seed) const {
  return {lr, batch, patience, max_epochs, stream_seed};
}

TrainOptions RunConfig::msp_train_options(std::uint64_t stream_seed) const {
  TrainOptions o = train_options(stream_seed);
  if (msp_max_epochs > 0) o.max_epochs = msp_max_epochs;
  return o;
}

labeling::LabelingConfig RunConfig::labeling_config() const {
  labeling::LabelingConfig c;
  c.window = w;
  c.min_states = min_s;
  c.restarts = restarts;
  c.max_states = max_s;
  c.seed = nd::derive_seed(seed, 0x6c6162656c);
  return c;
}

guidance::GuidanceConfig RunConfig::guidance_config() const { return {alpha, weight_mode}; }

synth::SynthConfig RunConfig::synth_config() const {
  synth::SynthConfig c = synth::benchmark_household(length, noise_sigma, spike_rate, seed, household_total);
  if (!appliances.empty()) c.appliances = appliances;
  return c;
}

void load_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    config.set(line.substr(0, eq), line.substr(eq + 1));
  }
}

RunConfig resolve_config(const std::filesystem::path* file,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig config;
  if (file) load_config_file(*file, config);
  for (const auto& [k, v] : overrides) config.set(k, v);
  config.validate();
  return config;
}

}  // namespace loadguide::app
