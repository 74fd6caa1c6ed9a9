#include "ensmhd/config.hpp"
#include "ensmhd/errors.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace ensmhd;

namespace {

ConfigFile parse(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in, "test.ini");
}

RunConfig read(const std::string& text, Experiment e) { return read_run_config(parse(text), e); }

std::string error_of(const std::string& text, Experiment e) {
  try {
    read(text, e);
  } catch (const ConfigError& err) {
    return err.what();
  }
  return {};
}

}  // namespace

TEST(ConfigFile, SectionsCommentsAndLists) {
  const ConfigFile f = parse(
      "# comment\n"
      "top = 1\n"
      "[Scheme]\n"
      "  DT = 0.5   # trailing\n"
      "steps = 4, 8 ,16\n"
      "; other comment\n"
      "[output]\n"
      "vtk = no\n");
  EXPECT_EQ(f.integer("", "top", 0), 1);
  EXPECT_EQ(f.number("scheme", "dt", 0.0), 0.5);
  EXPECT_EQ(f.integers("scheme", "steps", {}), (std::vector<int>{4, 8, 16}));
  EXPECT_FALSE(f.flag("output", "vtk", true));
  EXPECT_EQ(f.number("scheme", "missing", 3.0), 3.0);
  EXPECT_NO_THROW(f.reject_unused());
}

TEST(ConfigFile, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_EQ(message("[a]\nno equals sign\n"), "test.ini:2: expected 'key = value'");
  EXPECT_EQ(message("[a\n"), "test.ini:1: unterminated section header");
  EXPECT_EQ(message("[a]\nx = 1\nx = 2\n"), "test.ini:3: duplicate key 'x'");
  EXPECT_EQ(message("[a]\nx =\n"), "test.ini:2: missing value for 'x'");
}

TEST(ConfigFile, BadValuesNameTheField) {
  const ConfigFile f = parse("[scheme]\nt = one\n");
  try {
    f.number("scheme", "t", 1.0);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()), "test.ini:2: [scheme] t: expected a number, got 'one'");
  }
}

TEST(ConfigFile, UnknownKeyRejected) {
  const ConfigFile f = parse("[scheme]\nt = 1\ntypo = 2\n");
  f.number("scheme", "t", 0.0);
  EXPECT_THROW(f.reject_unused(), ConfigError);
}

TEST(RunConfig, DefaultsPerExperiment) {
  const RunConfig temporal = read("", Experiment::mms_temporal);
  EXPECT_EQ(temporal.step_levels, (std::vector<int>{4, 8, 16, 32, 64}));
  EXPECT_EQ(temporal.grid, 16);
  EXPECT_NEAR(temporal.resolved_theta(), 1.0 / 9.0, 1e-15);

  const RunConfig channel = read("[mesh]\nelement = SV\n", Experiment::channel_step);
  EXPECT_EQ(channel.phys.nu, 0.001);
  EXPECT_EQ(channel.phys.nu_m, 0.01);
  EXPECT_EQ(channel.phys.s, 0.001);
  EXPECT_EQ(channel.dt, 1.0);
  EXPECT_EQ(channel.end_time, 40.0);
  EXPECT_NEAR(channel.resolved_theta(), 1.0 / 9.0, 1e-15);
  EXPECT_EQ(channel.epsilons, (std::vector<double>{0.1, 0.01, 0.001}));

  const RunConfig spatial = read("", Experiment::mms_spatial);
  EXPECT_DOUBLE_EQ(spatial.dt, spatial.end_time / 8);
}

TEST(RunConfig, OverridesAndExplicitTheta) {
  const RunConfig c = read(
      "[physics]\nnu = 0.02\nnu_m = 0.01\n[scheme]\ntheta = 0.5\nt = 0.5\nsteps = 2,4,8\nj = 2\n"
      "[mesh]\nelement = sv\nn = 4\n[ensemble]\nepsilon = 0.1\n",
      Experiment::mms_temporal);
  EXPECT_EQ(c.theta, 0.5);
  EXPECT_EQ(c.members, 2);
  EXPECT_EQ(c.pair, ElementPair::scott_vogelius);
  EXPECT_EQ(c.grid, 4);
  EXPECT_EQ(c.epsilon, 0.1);
}

TEST(RunConfig, RejectsInvalidSettings) {
  EXPECT_NE(error_of("[scheme]\ntheta = 0.9\n", Experiment::mms_temporal), "");  // inadmissible
  EXPECT_NE(error_of("[scheme]\nsteps = 4, 8\n", Experiment::mms_temporal), "");
  EXPECT_NE(error_of("[scheme]\nsteps = 4, 8, 12\n", Experiment::mms_temporal), "");
  EXPECT_NE(error_of("[scheme]\nj = 5\n", Experiment::mms_temporal), "");
  EXPECT_NE(error_of("[physics]\nnu = -1\n", Experiment::mms_spatial), "");
  EXPECT_NE(error_of("[mesh]\nelement = P1\n", Experiment::mms_spatial), "");
  EXPECT_NE(error_of("[mesh]\nelement = TH\n", Experiment::channel_step), "");
  EXPECT_NE(error_of("[mesh]\nelement = SV\n[scheme]\ndt = 0.3\n", Experiment::channel_step), "");
  EXPECT_NE(error_of("[experiment]\nkind = bench\n", Experiment::mms_temporal), "");
  EXPECT_NE(error_of("[bench]\nmembers = 0\n", Experiment::bench), "");
  EXPECT_NE(error_of("[output]\nvtk = maybe\n", Experiment::bench), "");
  EXPECT_NE(error_of("[mesh]\nspacing = 2\n", Experiment::bench), "");
}

TEST(Experiments, NamesRoundTrip) {
  for (Experiment e : {Experiment::mms_temporal, Experiment::mms_spatial, Experiment::channel_step, Experiment::bench})
    EXPECT_EQ(parse_experiment(to_string(e)), e);
  EXPECT_THROW(parse_experiment("nope"), ConfigError);
}
