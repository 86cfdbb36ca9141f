// Command-line front end: generate-data, run, summarize.
// Exit codes: 0 success, 1 configuration error, 2 runtime or solver error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gridlearn/harness/config.hpp"
#include "gridlearn/harness/csv.hpp"
#include "gridlearn/harness/scenario.hpp"

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> data_seed;
  bool desk_scale = false;
  std::size_t chains = 0;
};

gridlearn::ScenarioConfig load(const Options& o) {
  auto c = gridlearn::load_config(o.config);
  if (o.desk_scale) gridlearn::apply_desk_scale(c);
  if (o.data_seed) c.data_seed = *o.data_seed;
  return c;
}

int generate_data(const Options& o) {
  auto c = load(o);
  if (o.seed) c.data_seed = *o.seed;
  gridlearn::write_data(gridlearn::make_problem(c), o.out);
  std::cout << "wrote data.csv and truth.csv to " << o.out << "\n";
  return 0;
}

int run(const Options& o) {
  auto c = load(o);
  if (o.seed) c.sampler.seed = *o.seed;
  const std::size_t chains = o.chains > 0 ? o.chains : c.chains;
  const auto results = gridlearn::run_chains(c, chains, o.out);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::cout << "chain " << i << ": u-acceptance " << r.acceptance.u << ", a-acceptance "
              << r.acceptance.a << ", e_r " << r.error.total << ", " << r.runtime_seconds << " s\n";
  }
  return 0;
}

int summarize(const Options& o) {
  if (!o.config.empty()) std::cout << gridlearn::render_config(load(o)) << "\n";
  const auto t = gridlearn::read_csv(std::filesystem::path(o.out) / "summary.csv");
  const auto key = t.column("key"), value = t.column("value");
  for (const auto& row : t.rows) std::cout << row[key] << ": " << row[value] << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint inference of unknown inputs and forward-model discretizations"};
  app.require_subcommand(1);
  Options o;

  auto common = [&o](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", o.config, "Scenario config file");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "Output directory");
    sub->add_option("--seed", o.seed, "Seed override");
    sub->add_option("--data-seed", o.data_seed, "Data seed override");
    sub->add_flag("--desk-scale", o.desk_scale, "Divide the iteration count by ten");
  };
  auto* gen = app.add_subcommand("generate-data", "Write synthetic data and truth");
  common(gen, true);
  auto* run_cmd = app.add_subcommand("run", "Run the sampler and write chain artifacts");
  common(run_cmd, true);
  run_cmd->add_option("--chains", o.chains, "Independent chains run concurrently");
  auto* sum = app.add_subcommand("summarize", "Print summary.csv of a run directory");
  common(sum, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return generate_data(o);
    if (run_cmd->parsed()) return run(o);
    return summarize(o);
  } catch (const gridlearn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
