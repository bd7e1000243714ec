#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loadguide/app/checkpoint.hpp"
#include "loadguide/app/commands.hpp"
#include "loadguide/app/run_config.hpp"
#include "loadguide/errors.hpp"
#include "loadguide/ndkernel/checksum.hpp"
#include "test_util.hpp"

using namespace loadguide;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string output;
};

CliResult run_cli(const fs::path& dir, const std::string& args) {
  const fs::path log = dir / "cli.log";
  const std::string cmd = "cd '" + dir.string() + "' && '" + std::string(LOADGUIDE_CLI_PATH) + "' " + args + " > '" +
                          log.string() + "' 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("loadguide_app_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  void write(const std::string& name, const std::string& text) { std::ofstream(dir_ / name) << text; }
  fs::path dir_;
};

}  // namespace

TEST(RunConfig, DefaultsMatchProtocol) {
  const app::RunConfig c;
  EXPECT_EQ(c.lookback, 336u);
  EXPECT_EQ(c.horizons, (std::vector<std::size_t>{1, 6, 12, 24, 36, 48, 60, 72, 168, 336}));
  EXPECT_EQ(c.lr, 0.001);
  EXPECT_EQ(c.batch, 128u);
  EXPECT_EQ(c.patience, 10);
  EXPECT_EQ(c.alpha, 1.0);
  EXPECT_EQ(c.w, 24u);
  EXPECT_EQ(c.min_s, 2);
  EXPECT_EQ(c.max_s, 5);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, SetParsesValuesAndRejectsUnknownKeys) {
  app::RunConfig c;
  c.set("horizons", "6, 24");
  c.set(" alpha ", " 0.5 ");
  c.set("weight_mode", "logit");
  c.set("per_variable", "false");
  c.set("forecaster", "mlp");
  c.set("restarts", "3");
  EXPECT_EQ(c.labeling_config().restarts, 3);
  EXPECT_EQ(c.horizons, (std::vector<std::size_t>{6, 24}));
  EXPECT_EQ(c.alpha, 0.5);
  EXPECT_EQ(c.weight_mode, guidance::WeightMode::logit_max);
  EXPECT_FALSE(c.per_variable);
  EXPECT_EQ(c.forecaster, forecaster::ForecasterKind::mlp);
  EXPECT_THROW(c.set("lookbak", "3"), ConfigError);
  EXPECT_THROW(c.set("lookback", "3x"), ConfigError);
  EXPECT_THROW(c.set("mode", "both"), ConfigError);
  c.restarts = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, ValidationRules) {
  app::RunConfig c;
  c.horizons = {6, 6};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.horizons = {24, 6};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.horizons = {0};
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lookback = 1;
  c.kernel_width = 5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.alpha = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RunConfig, ApplianceKeysBuildSynthConfig) {
  app::RunConfig c;
  c.set("appliance.kettle.levels", "0,2");
  c.set("appliance.kettle.dwell", "20,1");
  c.set("appliance.toaster.levels", "0,1");
  c.set("appliance.toaster.dwell", "0,2");
  c.set("appliance.toaster.trigger", "kettle,1,3,0.5");
  const auto s = c.synth_config();
  ASSERT_EQ(s.appliances.size(), 2u);
  EXPECT_EQ(s.appliances[1].trigger->source, "kettle");
  EXPECT_EQ(s.appliances[1].trigger->lag, 3u);
  EXPECT_EQ(s.appliances[1].trigger->target_state, 1);
  EXPECT_NE(c.echo().find("appliance.toaster.trigger = kettle,1,3,0.5,1"), std::string::npos);
  EXPECT_THROW(c.set("appliance.kettle.color", "red"), ConfigError);
}

TEST_F(TempDir, FileThenOverridesFlagsWin) {
  write("run.cfg", "# comment\nlookback = 48\nseed=3\nalpha = 2 # inline\n");
  const fs::path file = dir_ / "run.cfg";
  const auto c = app::resolve_config(&file, {{"seed", "9"}});
  EXPECT_EQ(c.lookback, 48u);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_EQ(c.alpha, 2.0);
  write("bad.cfg", "lookback 48\n");
  const fs::path bad = dir_ / "bad.cfg";
  EXPECT_THROW(app::resolve_config(&bad, {}), ConfigError);
}

TEST(RunConfig, EchoIsSortedAndComplete) {
  const auto echo = app::RunConfig{}.echo();
  EXPECT_NE(echo.find("lookback = 336\n"), std::string::npos);
  EXPECT_NE(echo.find("horizons = 1,6,12,24,36,48,60,72,168,336\n"), std::string::npos);
  EXPECT_NE(echo.find("lr = 0.001\n"), std::string::npos);
  std::istringstream in(echo);
  std::string prev, line;
  while (std::getline(in, line)) {
    EXPECT_LT(prev, line);
    prev = line;
  }
}

TEST_F(TempDir, CheckpointsRoundTripBitExactly) {
  msp::MspConfig mc;
  mc.lookback = 6;
  mc.horizon = 2;
  mc.variables = 2;
  mc.state_counts = {2, 4};
  mc.trunk_channels = 3;
  mc.ue_channels = 2;
  mc.seed = 12;
  auto m = msp::make_msp(mc);
  m.fusion.bias[1] = -1.0 / 3.0;
  app::save_msp(dir_ / "m.ckpt", m);
  const auto back = app::load_msp(dir_ / "m.ckpt");
  EXPECT_TRUE(back.config == m.config);
  EXPECT_EQ(nd::checksum(back.layers()), nd::checksum(m.layers()));

  forecaster::ForecasterConfig fc;
  fc.kind = forecaster::ForecasterKind::mlp;
  fc.lookback = 6;
  fc.horizon = 2;
  fc.variables = 2;
  fc.hidden = 4;
  const auto f = forecaster::make_forecaster(fc);
  app::save_forecaster(dir_ / "f.ckpt", f);
  const auto fb = app::load_forecaster(dir_ / "f.ckpt");
  EXPECT_TRUE(fb.config == f.config);
  EXPECT_EQ(nd::checksum(fb.layers()), nd::checksum(f.layers()));
}

TEST_F(TempDir, CorruptCheckpointIsDataError) {
  write("bad.ckpt", "not a checkpoint\n");
  EXPECT_THROW(app::load_msp(dir_ / "bad.ckpt"), DataError);
  EXPECT_THROW(app::load_forecaster(dir_ / "missing.ckpt"), DataError);
}

TEST_F(TempDir, CliSynthWritesBothFilesDeterministically) {
  auto r = run_cli(dir_, "synth --set length=300 --seed 4");
  ASSERT_EQ(r.code, 0) << r.output;
  const auto data1 = read_file(dir_ / "data.csv");
  const auto truth1 = read_file(dir_ / "truth.csv");
  EXPECT_EQ(std::count(data1.begin(), data1.end(), '\n'), 301);
  EXPECT_EQ(std::count(truth1.begin(), truth1.end(), '\n'), 301);
  r = run_cli(dir_, "synth --set length=300 --seed 4");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_file(dir_ / "data.csv"), data1);
  EXPECT_EQ(read_file(dir_ / "truth.csv"), truth1);
}

TEST_F(TempDir, CliSynthCycleIsConfigError) {
  write("cycle.cfg",
        "appliance.a.levels = 0,1\nappliance.a.dwell = 2,2\nappliance.a.trigger = b,1,1,0.5\n"
        "appliance.b.levels = 0,1\nappliance.b.dwell = 2,2\nappliance.b.trigger = a,1,1,0.5\n");
  const auto r = run_cli(dir_, "synth --config cycle.cfg");
  EXPECT_EQ(r.code, app::exit_config);
  EXPECT_NE(r.output.find("a -> b -> a"), std::string::npos) << r.output;
}

TEST_F(TempDir, CliLabelFindsPlantedThreeStates) {
  write("planted.cfg",
        "length = 1500\nnoise_sigma = 0.1\nspike_rate = 0\nhousehold_total = false\n"
        "appliance.dryer.levels = 0,5,10\nappliance.dryer.dwell = 60,60,60\nw = 1\nseed = 2\n");
  ASSERT_EQ(run_cli(dir_, "synth -c planted.cfg").code, 0);
  auto r = run_cli(dir_, "label -c planted.cfg");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_file(dir_ / "states.csv.meta"), "variable,states\ndryer,3\n");
  const auto first = read_file(dir_ / "states.csv");
  r = run_cli(dir_, "label -c planted.cfg");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(read_file(dir_ / "states.csv"), first);
}

TEST_F(TempDir, CliLabelWindowLongerThanSeries) {
  ASSERT_EQ(run_cli(dir_, "synth --set length=50").code, 0);
  const auto r = run_cli(dir_, "label --set w=60");
  EXPECT_EQ(r.code, app::exit_data);
  EXPECT_NE(r.output.find("exceeds series length"), std::string::npos) << r.output;
}

TEST_F(TempDir, CliConfigErrors) {
  EXPECT_EQ(run_cli(dir_, "synth --set nonsense=1").code, app::exit_config);
  EXPECT_EQ(run_cli(dir_, "synth --set horizons=24,6").code, app::exit_config);
  EXPECT_EQ(run_cli(dir_, "frobnicate").code, app::exit_config);
  EXPECT_EQ(run_cli(dir_, "eval --data nothere.csv").code, app::exit_data);
}

TEST_F(TempDir, CliStagesAndPipelineAgree) {
  write("small.cfg",
        "length = 700\nlookback = 24\nhorizons = 2,4\nmax_epochs = 2\nbatch = 32\ntrunk_channels = 3\n"
        "ue_channels = 2\nw = 4\nseed = 5\n");
  ASSERT_EQ(run_cli(dir_, "synth -c small.cfg").code, 0);
  ASSERT_EQ(run_cli(dir_, "label -c small.cfg").code, 0);
  auto r = run_cli(dir_, "pipeline -c small.cfg --report-dir pipe");
  ASSERT_EQ(r.code, 0) << r.output;
  for (const char* step : {"train-msp -c small.cfg", "train -c small.cfg --mode plain", "train -c small.cfg --mode erkg",
                           "eval -c small.cfg --mode plain --report-dir staged",
                           "eval -c small.cfg --mode erkg --report-dir staged", "compare -c small.cfg --report-dir staged"}) {
    r = run_cli(dir_, step);
    ASSERT_EQ(r.code, 0) << step << "\n" << r.output;
  }
  EXPECT_EQ(read_file(dir_ / "staged" / "comparison.csv"), read_file(dir_ / "pipe" / "comparison.csv"));
  EXPECT_EQ(read_file(dir_ / "staged" / "plain.csv"), read_file(dir_ / "pipe" / "plain.csv"));
  const auto plain = read_file(dir_ / "pipe" / "plain.csv");
  EXPECT_EQ(std::count(plain.begin(), plain.end(), '\n'), 3);  // header + one row per horizon
  EXPECT_NE(read_file(dir_ / "pipe" / "config_echo.txt").find("horizons = 2,4"), std::string::npos);
}

TEST_F(TempDir, CliErkgWithoutTeacherIsDataError) {
  write("small.cfg", "length = 400\nlookback = 24\nhorizons = 2\nmax_epochs = 1\nw = 4\n");
  ASSERT_EQ(run_cli(dir_, "synth -c small.cfg").code, 0);
  ASSERT_EQ(run_cli(dir_, "label -c small.cfg").code, 0);
  const auto r = run_cli(dir_, "train -c small.cfg --mode erkg");
  EXPECT_EQ(r.code, app::exit_data);
  EXPECT_NE(r.output.find("train erkg h2"), std::string::npos) << r.output;
}

TEST_F(TempDir, PrintConfigShowsEffectiveValues) {
  const auto r = run_cli(dir_, "pipeline --alpha 0.25 --set lookback=96 --print-config");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("alpha = 0.25\n"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("lookback = 96\n"), std::string::npos);
}
