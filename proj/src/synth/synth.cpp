#include "loadguide/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/random.hpp"

namespace loadguide::synth {

void SynthConfig::validate() const {
  if (appliances.empty()) throw ConfigError("synth: no appliances");
  if (length < 1) throw ConfigError("synth: length must be >= 1");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!(spike_rate >= 0.0 && spike_rate <= 1.0)) throw ConfigError("synth: spike_rate must be in [0, 1]");
  if (step_seconds < 1) throw ConfigError("synth: step_seconds must be >= 1");

  std::map<std::string, std::size_t> index;
  for (std::size_t a = 0; a < appliances.size(); ++a) {
    const auto& spec = appliances[a];
    if (spec.name.empty() || spec.name == "timestamp" || spec.name.find(',') != std::string::npos)
      throw ConfigError("synth: invalid appliance name '" + spec.name + "'");
    if (!index.emplace(spec.name, a).second) throw ConfigError("synth: duplicate appliance '" + spec.name + "'");
    if (spec.levels.size() < 2 || spec.levels.size() > 5)
      throw ConfigError("synth: appliance '" + spec.name + "' needs 2 to 5 state levels");
    if (spec.dwell_means.size() != spec.levels.size())
      throw ConfigError("synth: appliance '" + spec.name + "' needs one dwell mean per state");
    for (double m : spec.dwell_means)
      if (!(m == 0.0 || m >= 1.0)) throw ConfigError("synth: dwell means of '" + spec.name + "' must be 0 or >= 1");
  }
  if (include_household_total && index.count("total")) throw ConfigError("synth: 'total' is reserved");

  for (const auto& spec : appliances) {
    if (!spec.trigger) continue;
    const auto& t = *spec.trigger;
    auto src = index.find(t.source);
    if (src == index.end()) throw ConfigError("synth: '" + spec.name + "' is triggered by unknown '" + t.source + "'");
    const auto& source = appliances[src->second];
    if (t.source_state < 0 || static_cast<std::size_t>(t.source_state) >= source.levels.size())
      throw ConfigError("synth: trigger source state out of range for '" + spec.name + "'");
    if (t.target_state < 0 || static_cast<std::size_t>(t.target_state) >= spec.levels.size())
      throw ConfigError("synth: trigger target state out of range for '" + spec.name + "'");
    if (t.lag < 1) throw ConfigError("synth: trigger lag of '" + spec.name + "' must be >= 1");
    if (!(t.probability >= 0.0 && t.probability <= 1.0))
      throw ConfigError("synth: trigger probability of '" + spec.name + "' must be in [0, 1]");
  }

  // Each appliance has at most one trigger source, so following sources is a
  // walk in a functional graph; a revisit within one walk is a cycle.
  for (std::size_t a = 0; a < appliances.size(); ++a) {
    std::vector<std::size_t> path{a};
    std::size_t cur = a;
    while (appliances[cur].trigger) {
      cur = index.at(appliances[cur].trigger->source);
      auto hit = std::find(path.begin(), path.end(), cur);
      if (hit != path.end()) {
        std::string cycle;
        for (auto it = hit; it != path.end(); ++it) cycle += appliances[*it].name + " -> ";
        cycle += appliances[cur].name;
        throw ConfigError("synth: cyclic trigger chain " + cycle);
      }
      path.push_back(cur);
    }
  }
}

namespace {

struct Machine {
  int state = 0;
  std::size_t remaining = 0;  // 0 with an absorbing state means "stay"
};

std::size_t draw_dwell(double mean, std::mt19937_64& rng) {
  if (mean == 0.0) return 0;
  if (mean <= 1.0) return 1;
  std::geometric_distribution<std::size_t> geo(1.0 / mean);
  return geo(rng) + 1;
}

}  // namespace

SynthOutput generate(const SynthConfig& config) {
  config.validate();
  const std::size_t n_app = config.appliances.size();
  const std::size_t l = config.length;
  const std::size_t d = n_app + (config.include_household_total ? 1 : 0);

  std::map<std::string, std::size_t> index;
  for (std::size_t a = 0; a < n_app; ++a) index[config.appliances[a].name] = a;
  // followers[a] = appliances triggered by a
  std::vector<std::vector<std::size_t>> followers(n_app);
  for (std::size_t a = 0; a < n_app; ++a)
    if (config.appliances[a].trigger) followers[index.at(config.appliances[a].trigger->source)].push_back(a);

  std::mt19937_64 state_rng(nd::derive_seed(config.seed, 0x7374617465));
  std::mt19937_64 noise_rng(nd::derive_seed(config.seed, 0x6e6f697365));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<Machine> machines(n_app);
  for (std::size_t a = 0; a < n_app; ++a) machines[a].remaining = draw_dwell(config.appliances[a].dwell_means[0], state_rng);
  // forced[a][t] = state to enter at step t
  std::vector<std::map<std::size_t, int>> forced(n_app);

  SynthOutput out;
  out.frame.variable_names.reserve(d);
  for (const auto& spec : config.appliances) out.frame.variable_names.push_back(spec.name);
  if (config.include_household_total) out.frame.variable_names.push_back("total");
  out.frame.timestamps.resize(l);
  out.frame.values = nd::Matrix(l, d);
  out.states.variable_names.assign(out.frame.variable_names.begin(), out.frame.variable_names.begin() + static_cast<std::ptrdiff_t>(n_app));
  out.states.labels.assign(l * n_app, 0);
  for (const auto& spec : config.appliances) out.states.counts.push_back(static_cast<int>(spec.levels.size()));

  std::vector<int> previous(n_app, 0);
  for (std::size_t t = 0; t < l; ++t) {
    out.frame.timestamps[t] = config.start_timestamp + static_cast<std::int64_t>(t) * config.step_seconds;
    for (std::size_t a = 0; a < n_app; ++a) {
      const auto& spec = config.appliances[a];
      auto& m = machines[a];
      if (t > 0) {
        auto f = forced[a].find(t);
        if (f != forced[a].end()) {
          m.state = f->second;
          m.remaining = draw_dwell(spec.dwell_means[static_cast<std::size_t>(m.state)], state_rng);
          forced[a].erase(f);
        } else if (m.remaining > 0 && --m.remaining == 0) {
          m.state = (m.state + 1) % static_cast<int>(spec.levels.size());
          m.remaining = draw_dwell(spec.dwell_means[static_cast<std::size_t>(m.state)], state_rng);
        }
      }
      out.states.labels[t * n_app + a] = m.state;
    }
    // schedule triggers from state entries at this step
    if (t > 0) {
      for (std::size_t a = 0; a < n_app; ++a) {
        const int s = machines[a].state;
        if (s == previous[a]) continue;
        for (std::size_t f : followers[a]) {
          const auto& trig = *config.appliances[f].trigger;
          if (trig.source_state != s) continue;
          if (unit(state_rng) < trig.probability) forced[f][t + trig.lag] = trig.target_state;
        }
      }
    }
    for (std::size_t a = 0; a < n_app; ++a) previous[a] = machines[a].state;

    double total = 0.0;
    for (std::size_t a = 0; a < n_app; ++a) {
      const auto& spec = config.appliances[a];
      double v = spec.levels[static_cast<std::size_t>(machines[a].state)];
      if (config.noise_sigma > 0.0) v += std::normal_distribution<double>(0.0, config.noise_sigma)(noise_rng);
      if (config.spike_rate > 0.0 && unit(noise_rng) < config.spike_rate) {
        v += config.noise_sigma * (2.0 + 4.0 * unit(noise_rng));
      }
      out.frame.values(t, a) = v;
      total += v;
    }
    if (config.include_household_total) out.frame.values(t, n_app) = total;
  }
  out.states.timestamps = out.frame.timestamps;
  return out;
}

SynthConfig benchmark_household(std::size_t length, double noise_sigma, double spike_rate, std::uint64_t seed,
                                bool include_household_total) {
  SynthConfig c;
  c.length = length;
  c.noise_sigma = noise_sigma;
  c.spike_rate = spike_rate;
  c.seed = seed;
  c.include_household_total = include_household_total;
  c.appliances = {
      {"fridge", {0.1, 1.0}, {6, 4}, std::nullopt},
      {"washer", {0.0, 2.0, 3.0}, {48, 3, 2}, std::nullopt},
      {"dryer", {0.0, 2.5, 4.0}, {0, 3, 2}, Trigger{"washer", 0, 2, 0.9, 1}},
      {"oven", {0.0, 2.0, 3.5}, {40, 2, 2}, std::nullopt},
      {"dishwasher", {0.0, 1.5, 2.5}, {0, 3, 2}, Trigger{"oven", 0, 3, 0.8, 1}},
      {"kettle", {0.0, 1.8}, {20, 1}, std::nullopt},
      {"lights", {0.2, 1.2}, {10, 6}, Trigger{"oven", 1, 1, 0.7, 1}},
      {"heatpump", {0.0, 1.2, 2.4}, {12, 6, 4}, std::nullopt},
  };
  return c;
}

}  // namespace loadguide::synth
