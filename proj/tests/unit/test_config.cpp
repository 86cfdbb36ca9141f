#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "gridlearn/harness/config.hpp"

using namespace gridlearn;

namespace {

ScenarioConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.ini");
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsPerScenario) {
  const auto beam = default_config(ScenarioId::BeamContinuous);
  EXPECT_EQ(beam.sampler.n_iterations, 120000u);
  EXPECT_EQ(beam.sampler.beta, 0.08);
  EXPECT_EQ(beam.k_mean, 60.0);
  const auto discrete = default_config(ScenarioId::BeamDiscrete);
  EXPECT_EQ(discrete.k, 85u);
  EXPECT_EQ(discrete.k_mean, 0.0);
  const auto sde = default_config(ScenarioId::Sde);
  EXPECT_EQ(sde.k, 24u);
  EXPECT_EQ(sde.sampler.n_iterations, 100000u);
  EXPECT_EQ(sde.sampler.beta, 0.1);
  const auto fem = default_config(ScenarioId::SourceDetection);
  EXPECT_EQ(fem.k, 100u);
  EXPECT_EQ(fem.sampler.n_iterations, 10000u);
}

TEST(Config, ParsesOverridesOnTopOfDefaults) {
  const auto c = parse(
      "# comment\n"
      "[scenario]\n"
      "id = beam-discrete   ; trailing comment\n"
      "layout = left\n"
      "[sampler]\n"
      "iterations = 500\n"
      "seed = 9\n"
      "k_steps = -2, 2\n");
  EXPECT_EQ(c.scenario, ScenarioId::BeamDiscrete);
  EXPECT_EQ(c.layout, Layout::Left);
  EXPECT_EQ(c.sampler.n_iterations, 500u);
  EXPECT_EQ(c.sampler.seed, 9u);
  EXPECT_EQ(c.sampler.k_proposal.steps, (std::vector<long>{-2, 2}));
  EXPECT_EQ(c.k, 85u);
}

TEST(Config, ErrorsNameKeyAndLine) {
  const auto unknown = error_of("[scenario]\nid = sde\n[sampler]\nbogus = 1\n");
  EXPECT_NE(unknown.find("test.ini:4"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("sampler.bogus"), std::string::npos) << unknown;

  const auto bad_value = error_of("[scenario]\nid = sde\n[sampler]\nbeta = fast\n");
  EXPECT_NE(bad_value.find("test.ini:4"), std::string::npos) << bad_value;
  EXPECT_NE(bad_value.find("sampler.beta"), std::string::npos) << bad_value;

  const auto dup = error_of("[scenario]\nid = sde\nid = sde\n");
  EXPECT_NE(dup.find("test.ini:3"), std::string::npos) << dup;

  const auto bad_id = error_of("[scenario]\nid = pendulum\n");
  EXPECT_NE(bad_id.find("scenario.id"), std::string::npos) << bad_id;

  EXPECT_NE(error_of("[sampler]\nseed = 1\n").find("scenario.id"), std::string::npos);
  EXPECT_NE(error_of("seed = 1\n").find("outside any section"), std::string::npos);
  EXPECT_NE(error_of("[scenario\nid = sde\n").find("malformed"), std::string::npos);
}

TEST(Config, ValidationFailuresAreConfigErrors) {
  EXPECT_NE(error_of("[scenario]\nid = sde\n[sampler]\nbeta = 1.5\n").find("beta"), std::string::npos);
  EXPECT_FALSE(error_of("[scenario]\nid = sde\nburn_in = 1\n").empty());
  EXPECT_FALSE(error_of("[scenario]\nid = sde\nchains = 0\n").empty());
  EXPECT_FALSE(error_of("[scenario]\nid = sde\n[sde]\ninitial_grid = random\n").empty());
  EXPECT_FALSE(error_of("[scenario]\nid = source-detection\n[fem]\ntrue_source = 0.5\n").empty());
}

TEST(Config, RenderRoundTrips) {
  for (auto id : {ScenarioId::BeamDiscrete, ScenarioId::BeamContinuous, ScenarioId::Sde,
                  ScenarioId::SourceDetection}) {
    auto c = default_config(id);
    c.sampler.seed = 123;
    c.data_seed = 77;
    c.sampler.beta = 0.1234567890123;
    const std::string text = render_config(c);
    const auto back = parse(text);
    EXPECT_EQ(render_config(back), text) << to_string(id);
    EXPECT_EQ(back.sampler.beta, c.sampler.beta);
  }
}

TEST(Config, DeskScaleDividesIterations) {
  auto c = default_config(ScenarioId::BeamContinuous);
  apply_desk_scale(c);
  EXPECT_EQ(c.sampler.n_iterations, 12000u);
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(GRIDLEARN_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    EXPECT_NO_THROW(load_config(entry.path())) << entry.path();
  }
  EXPECT_THROW(load_config("/nonexistent/config.ini"), ConfigError);
}
