#pragma once

// End-to-end experiments: data generation, chain execution, summaries and
// CSV artifacts for the beam, SDE and source-detection scenarios.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridlearn/diagnostics.hpp"
#include "gridlearn/harness/config.hpp"
#include "gridlearn/harness/csv.hpp"
#include "gridlearn/mesh.hpp"
#include "gridlearn/samplers.hpp"

namespace gridlearn {

/// Sensor positions along the beam for a layout (ten sensors each).
std::vector<double> beam_sensors(Layout layout);

/// Segment moduli (GPa) of the piecewise-constant truth.
Vector beam_discrete_truth();

/// Smooth modulus (GPa) used as the continuous truth.
double beam_continuous_truth(double x);

struct TruthRow {
  std::string quantity;
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

/// Everything a chain needs, built deterministically from a config.
struct Problem {
  ScenarioConfig config;
  ObservationModel obs;
  std::shared_ptr<const ForwardModel> forward;
  UnknownPrior prior;
  UnknownState initial_u;
  DiscretizationParam initial_a;
  DiscretizationKernels kernels;
  Vector reference_output;  // noise-free forward output of the truth
  std::vector<TruthRow> truth;
  std::optional<Mesh> reference_mesh;  // source detection: fine mesh behind the data
};

Problem make_problem(const ScenarioConfig& config);

struct NamedBands {
  std::string quantity;
  std::vector<double> abscissae;
  Bands bands;
};

struct ScenarioResult {
  ScenarioConfig config;
  Problem problem;
  ChainRecord chain;
  std::vector<std::size_t> posterior;  // indices into chain.samples after burn-in
  AcceptanceSummary acceptance;
  ReconstructionError error;
  std::optional<GridHistogram> histogram;
  std::vector<NamedBands> bands;
  std::optional<Mesh> final_mesh;
  std::vector<std::pair<std::string, std::string>> summary;
  double runtime_seconds = 0.0;

  std::vector<const ChainSample*> posterior_samples() const;
};

/// Source detection: sampled predictions minus the reference-mesh solution
/// for the same sampled source, per sensor and averaged over sensors.
struct PushforwardError {
  double mean = 0.0;  // |mean difference|
  double rms = 0.0;   // root-mean-square difference
};
PushforwardError pushforward_error(const Problem& problem,
                                   const std::vector<const ChainSample*>& samples);

/// Runs one chain (seed from config.sampler.seed) and computes summaries.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// data.csv and truth.csv.
void write_data(const Problem& problem, const std::filesystem::path& dir);

/// chain_u.csv, chain_a.csv, grid_histogram.csv, bands.csv, summary.csv,
/// reconstruction_error.csv, running_means.csv, mesh_final.csv, data.csv,
/// truth.csv and timing.csv. All but timing.csv are deterministic.
void write_artifacts(const ScenarioResult& result, const std::filesystem::path& dir);

/// Runs `chains` chains on threads with seeds seed, seed + 1, ...; chain i
/// writes to dir/chain_i and dir/summary.csv holds the per-key mean of the
/// numeric summary values.
std::vector<ScenarioResult> run_chains(const ScenarioConfig& config, std::size_t chains,
                                       const std::filesystem::path& dir);

/// Percentile bands of the predicted observations over the post-burn-in
/// samples of all chains.
NamedBands pooled_prediction_bands(const std::vector<ScenarioResult>& results);

CsvTable summary_table(const ScenarioResult& result);
CsvTable bands_table(const std::vector<NamedBands>& bands);
CsvTable mesh_table(const Mesh& mesh);

}  // namespace gridlearn
