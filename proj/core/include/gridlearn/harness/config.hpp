#pragma once

// Scenario configuration: a flat INI-style file of `key = value` lines under
// [section] headers. '#' and ';' start comments.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridlearn/beam.hpp"
#include "gridlearn/fem.hpp"
#include "gridlearn/samplers.hpp"
#include "gridlearn/sde.hpp"

namespace gridlearn {

/// Invalid configuration. The message names the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioId { BeamDiscrete, BeamContinuous, Sde, SourceDetection };
enum class Layout { Left, Right, Spread };

std::string to_string(ScenarioId id);
std::string to_string(Layout layout);
ScenarioId parse_scenario_id(const std::string& text);
Layout parse_layout(const std::string& text);

struct ScenarioConfig {
  ScenarioId scenario = ScenarioId::BeamContinuous;
  Layout layout = Layout::Right;
  bool baseline = false;  // fixed uniform grid, Stage II skipped
  bool zero_noise = false;
  std::uint64_t data_seed = 2024;
  double burn_in = 0.2;
  std::size_t chains = 1;

  SamplerConfig sampler;

  // Discretization prior: Poisson(k_mean) when k_mean > 0, else a point mass at k.
  double k_mean = 0.0;
  std::size_t k = 85;
  std::size_t k_min = 2;
  std::size_t k_max = 0;  // 0: 10 * k_mean

  // Beam
  BeamConfig beam;
  std::size_t beam_reference_k = 500;
  double representation_step = 0.1;  // continuous modulus grid

  // SDE
  SdeConfig sde;
  // "uniform" over (t_0, T), "prior" draws, or "window": uniform over
  // (t_0, last observation time).
  std::string initial_grid = "uniform";
  std::string initial_path = "zero";     // or "prior"

  // Source detection
  FemConfig fem;
  PlanarPoint initial_source{0.2, 0.2};
  BetaParameters initial_theta{1.0, 1.0, 1.0, 1.0};

  void validate() const;
};

/// Default settings for a scenario.
ScenarioConfig default_config(ScenarioId id);

/// Reads a config file on top of the defaults of its [scenario] id.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(render_config(c)) reproduces c.
std::string render_config(const ScenarioConfig& c);

/// Divides the iteration count by ten.
void apply_desk_scale(ScenarioConfig& c);

}  // namespace gridlearn
