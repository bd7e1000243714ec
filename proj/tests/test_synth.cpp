#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "loadguide/errors.hpp"
#include "loadguide/synth/synth.hpp"

using namespace loadguide;
using synth::ApplianceSpec;
using synth::SynthConfig;
using synth::Trigger;

namespace {

SynthConfig washer_dryer(std::size_t length, double p, std::size_t lag) {
  SynthConfig c;
  c.length = length;
  c.seed = 17;
  c.appliances.push_back({"washer", {0.0, 2.0}, {30.0, 5.0}, std::nullopt});
  c.appliances.push_back({"dryer", {0.0, 3.0}, {0.0, 4.0}, Trigger{"washer", 1, lag, p, 1}});
  return c;
}

std::vector<int> states_of(const synth::SynthOutput& out, std::size_t a) {
  std::vector<int> s;
  for (std::size_t t = 0; t < out.states.length(); ++t) s.push_back(out.states.label(t, a));
  return s;
}

}  // namespace

TEST(Synth, SeedDeterminism) {
  const auto cfg = synth::benchmark_household(500, 0.15, 0.01, 3);
  const auto a = synth::generate(cfg);
  const auto b = synth::generate(cfg);
  EXPECT_EQ(a.frame, b.frame);
  EXPECT_EQ(a.states, b.states);
  auto other = cfg;
  other.seed = 4;
  EXPECT_NE(synth::generate(other).frame, a.frame);
}

TEST(Synth, NoiselessValuesEqualLevels) {
  const auto cfg = synth::benchmark_household(2000, 0.0, 0.0, 5, false);
  const auto out = synth::generate(cfg);
  for (std::size_t t = 0; t < out.frame.length(); ++t)
    for (std::size_t a = 0; a < cfg.appliances.size(); ++a)
      EXPECT_EQ(out.frame.values(t, a), cfg.appliances[a].levels[static_cast<std::size_t>(out.states.label(t, a))]);
}

TEST(Synth, NearestLevelRecoversStatesFromNoiselessSignal) {
  const auto cfg = synth::benchmark_household(1000, 0.0, 0.0, 6, false);
  const auto out = synth::generate(cfg);
  for (std::size_t a = 0; a < cfg.appliances.size(); ++a) {
    const auto& levels = cfg.appliances[a].levels;
    for (std::size_t t = 0; t < out.frame.length(); ++t) {
      std::size_t best = 0;
      for (std::size_t s = 1; s < levels.size(); ++s)
        if (std::abs(out.frame.values(t, a) - levels[s]) < std::abs(out.frame.values(t, a) - levels[best])) best = s;
      EXPECT_EQ(static_cast<int>(best), out.states.label(t, a));
    }
  }
}

TEST(Synth, TotalIsRowSum) {
  const auto out = synth::generate(synth::benchmark_household(800, 0.15, 0.05, 2));
  const std::size_t n = out.frame.variables() - 1;
  EXPECT_EQ(out.frame.variable_names.back(), "total");
  EXPECT_EQ(out.states.variables(), n);
  for (std::size_t t = 0; t < out.frame.length(); ++t) {
    double s = 0.0;
    for (std::size_t a = 0; a < n; ++a) s += out.frame.values(t, a);
    EXPECT_EQ(out.frame.values(t, n), s);
  }
}

TEST(Synth, TriggerFrequencyMatchesProbability) {
  const auto out = synth::generate(washer_dryer(50000, 0.9, 2));
  const auto washer = states_of(out, 0), dryer = states_of(out, 1);
  std::size_t events = 0, followed = 0;
  for (std::size_t t = 1; t + 2 < washer.size(); ++t) {
    if (washer[t] == 1 && washer[t - 1] == 0) {
      ++events;
      followed += dryer[t + 2] == 1 && dryer[t + 1] == 0 ? 1 : 0;
    }
  }
  ASSERT_GT(events, 500u);
  EXPECT_NEAR(static_cast<double>(followed) / static_cast<double>(events), 0.9, 0.05);
}

TEST(Synth, DwellMeansWithinTenPercent) {
  SynthConfig c;
  c.length = 60000;
  c.seed = 8;
  c.appliances.push_back({"heater", {0.0, 1.0, 2.0}, {12.0, 6.0, 3.0}, std::nullopt});
  const auto out = synth::generate(c);
  const auto s = states_of(out, 0);
  std::map<int, std::pair<double, double>> runs;  // state -> (total length, count)
  std::size_t start = 0;
  for (std::size_t t = 1; t <= s.size(); ++t) {
    if (t == s.size() || s[t] != s[start]) {
      if (start > 0 && t < s.size()) {  // skip censored first/last runs
        runs[s[start]].first += static_cast<double>(t - start);
        runs[s[start]].second += 1.0;
      }
      start = t;
    }
  }
  for (int state = 0; state < 3; ++state) {
    const double mean = runs[state].first / runs[state].second;
    EXPECT_NEAR(mean, c.appliances[0].dwell_means[static_cast<std::size_t>(state)],
                0.1 * c.appliances[0].dwell_means[static_cast<std::size_t>(state)])
        << "state " << state;
  }
}

TEST(Synth, SpikesAddPositiveOutliers) {
  SynthConfig c;
  c.length = 20000;
  c.noise_sigma = 0.1;
  c.spike_rate = 0.05;
  c.seed = 1;
  c.appliances.push_back({"flat", {1.0, 1.0}, {10.0, 10.0}, std::nullopt});
  const auto out = synth::generate(c);
  std::size_t big = 0;
  for (std::size_t t = 0; t < c.length; ++t) big += out.frame.values(t, 0) > 1.0 + 0.45 ? 1 : 0;
  // Gaussian alone exceeds 4.5 sigma almost never; spikes >= 2 sigma with rate 0.05
  EXPECT_GT(big, 200u);
  EXPECT_LT(big, 1000u);
}

TEST(Synth, CycleDetectedAndNamed) {
  SynthConfig c;
  c.length = 10;
  c.appliances.push_back({"a", {0, 1}, {2, 2}, Trigger{"b", 1, 1, 0.5, 1}});
  c.appliances.push_back({"b", {0, 1}, {2, 2}, Trigger{"a", 1, 1, 0.5, 1}});
  try {
    c.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("a -> b -> a"), std::string::npos) << e.what();
  }
}

TEST(Synth, ConfigValidation) {
  auto c = washer_dryer(10, 0.5, 1);
  c.appliances[0].levels = {1.0};
  c.appliances[0].dwell_means = {1.0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = washer_dryer(10, 1.5, 1);
  EXPECT_THROW(c.validate(), ConfigError);
  c = washer_dryer(10, 0.5, 0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = washer_dryer(10, 0.5, 1);
  c.appliances[1].trigger->source = "oven";
  EXPECT_THROW(c.validate(), ConfigError);
  c = washer_dryer(0, 0.5, 1);
  EXPECT_THROW(c.validate(), ConfigError);
  c = washer_dryer(10, 0.5, 1);
  c.noise_sigma = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Synth, BenchmarkHouseholdShape) {
  const auto cfg = synth::benchmark_household(100, 0.15, 0.01, 1);
  EXPECT_EQ(cfg.appliances.size(), 8u);
  EXPECT_NO_THROW(cfg.validate());
  const auto out = synth::generate(cfg);
  EXPECT_EQ(out.frame.length(), 100u);
  EXPECT_EQ(out.frame.variables(), 9u);
  EXPECT_EQ(out.frame.timestamps[1] - out.frame.timestamps[0], 3600);
}
