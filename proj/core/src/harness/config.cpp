#include "gridlearn/harness/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace gridlearn {

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::BeamDiscrete: return "beam-discrete";
    case ScenarioId::BeamContinuous: return "beam-continuous";
    case ScenarioId::Sde: return "sde";
    case ScenarioId::SourceDetection: return "source-detection";
  }
  return "?";
}

std::string to_string(Layout layout) {
  switch (layout) {
    case Layout::Left: return "left";
    case Layout::Right: return "right";
    case Layout::Spread: return "spread";
  }
  return "?";
}

ScenarioId parse_scenario_id(const std::string& text) {
  for (auto id : {ScenarioId::BeamDiscrete, ScenarioId::BeamContinuous, ScenarioId::Sde,
                  ScenarioId::SourceDetection}) {
    if (text == to_string(id)) return id;
  }
  throw ConfigError("unknown scenario id '" + text + "'");
}

Layout parse_layout(const std::string& text) {
  for (auto l : {Layout::Left, Layout::Right, Layout::Spread}) {
    if (text == to_string(l)) return l;
  }
  throw ConfigError("unknown observation layout '" + text + "'");
}

void ScenarioConfig::validate() const {
  sampler.validate();
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError("scenario.burn_in must lie in [0, 1)");
  if (chains == 0) throw ConfigError("scenario.chains must be positive");
  if (k_mean < 0.0) throw ConfigError("prior.k_mean must be nonnegative");
  if (k_mean == 0.0 && k == 0) throw ConfigError("prior.k must be positive");
  if (k_max != 0 && k_max < k_min) throw ConfigError("prior.k_max must be at least prior.k_min");
  if (!(representation_step > 0.0)) throw ConfigError("beam.representation_step must be positive");
  if (initial_grid != "uniform" && initial_grid != "prior" && initial_grid != "window") {
    throw ConfigError("sde.initial_grid must be 'uniform', 'prior' or 'window'");
  }
  if (initial_path != "zero" && initial_path != "prior") {
    throw ConfigError("sde.initial_path must be 'zero' or 'prior'");
  }
  try {
    beam.validate();
    sde.validate();
    fem.validate();
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig c;
  c.scenario = id;
  c.sampler.zeta = 0.5;
  switch (id) {
    case ScenarioId::BeamDiscrete:
      c.sampler.n_iterations = 120000;
      c.sampler.beta = 0.08;
      c.k = 85;
      break;
    case ScenarioId::BeamContinuous:
      c.sampler.n_iterations = 120000;
      c.sampler.beta = 0.08;
      c.k_mean = 60.0;
      c.k = 60;
      break;
    case ScenarioId::Sde:
      c.sampler.n_iterations = 100000;
      c.sampler.beta = 0.1;
      c.k = 24;
      c.chains = 16;
      break;
    case ScenarioId::SourceDetection:
      c.sampler.n_iterations = 10000;
      c.sampler.random_walk_step = 0.1;
      c.k = 100;
      break;
  }
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) throw std::invalid_argument("not a number");
  return x;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw std::invalid_argument("not a nonnegative integer");
  }
  return x;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("not a boolean");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

std::vector<double> to_doubles(const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(to_double(s));
  return out;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"scenario.id", [](ScenarioConfig& c, const std::string& v) { c.scenario = parse_scenario_id(v); }},
      {"scenario.layout", [](ScenarioConfig& c, const std::string& v) { c.layout = parse_layout(v); }},
      {"scenario.baseline", [](ScenarioConfig& c, const std::string& v) { c.baseline = to_bool(v); }},
      {"scenario.zero_noise", [](ScenarioConfig& c, const std::string& v) { c.zero_noise = to_bool(v); }},
      {"scenario.data_seed", [](ScenarioConfig& c, const std::string& v) { c.data_seed = to_uint(v); }},
      {"scenario.burn_in", [](ScenarioConfig& c, const std::string& v) { c.burn_in = to_double(v); }},
      {"scenario.chains", [](ScenarioConfig& c, const std::string& v) { c.chains = to_uint(v); }},

      {"sampler.iterations", [](ScenarioConfig& c, const std::string& v) { c.sampler.n_iterations = to_uint(v); }},
      {"sampler.beta", [](ScenarioConfig& c, const std::string& v) { c.sampler.beta = to_double(v); }},
      {"sampler.zeta", [](ScenarioConfig& c, const std::string& v) { c.sampler.zeta = to_double(v); }},
      {"sampler.seed", [](ScenarioConfig& c, const std::string& v) { c.sampler.seed = to_uint(v); }},
      {"sampler.thin", [](ScenarioConfig& c, const std::string& v) { c.sampler.thin = to_uint(v); }},
      {"sampler.random_walk_step", [](ScenarioConfig& c, const std::string& v) { c.sampler.random_walk_step = to_double(v); }},
      {"sampler.density_step", [](ScenarioConfig& c, const std::string& v) { c.sampler.density_step = to_double(v); }},
      {"sampler.k_steps", [](ScenarioConfig& c, const std::string& v) {
         c.sampler.k_proposal.steps.clear();
         for (const auto& s : split_list(v)) {
           long x = 0;
           const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
           if (ec != std::errc() || p != s.data() + s.size()) throw std::invalid_argument("not an integer list");
           c.sampler.k_proposal.steps.push_back(x);
         }
       }},

      {"prior.k_mean", [](ScenarioConfig& c, const std::string& v) { c.k_mean = to_double(v); }},
      {"prior.k", [](ScenarioConfig& c, const std::string& v) { c.k = to_uint(v); }},
      {"prior.k_min", [](ScenarioConfig& c, const std::string& v) { c.k_min = to_uint(v); }},
      {"prior.k_max", [](ScenarioConfig& c, const std::string& v) { c.k_max = to_uint(v); }},

      {"beam.mollifier_width", [](ScenarioConfig& c, const std::string& v) { c.beam.mollifier_width = to_double(v); }},
      {"beam.observation_variance", [](ScenarioConfig& c, const std::string& v) { c.beam.observation_variance = to_double(v); }},
      {"beam.displacement_scale", [](ScenarioConfig& c, const std::string& v) { c.beam.displacement_scale = to_double(v); }},
      {"beam.tip_mass", [](ScenarioConfig& c, const std::string& v) { c.beam.tip_mass = to_double(v); }},
      {"beam.gravity", [](ScenarioConfig& c, const std::string& v) { c.beam.gravity = to_double(v); }},
      {"beam.reference_k", [](ScenarioConfig& c, const std::string& v) { c.beam_reference_k = to_uint(v); }},
      {"beam.representation_step", [](ScenarioConfig& c, const std::string& v) { c.representation_step = to_double(v); }},

      {"sde.noise_sd", [](ScenarioConfig& c, const std::string& v) { c.sde.noise_sd = to_double(v); }},
      {"sde.divergence_bound", [](ScenarioConfig& c, const std::string& v) { c.sde.divergence_bound = to_double(v); }},
      {"sde.drift", [](ScenarioConfig& c, const std::string& v) { c.sde.drift_enabled = to_bool(v); }},
      {"sde.observation_times", [](ScenarioConfig& c, const std::string& v) { c.sde.observation_times = to_doubles(v); }},
      {"sde.initial_grid", [](ScenarioConfig& c, const std::string& v) { c.initial_grid = v; }},
      {"sde.initial_path", [](ScenarioConfig& c, const std::string& v) { c.initial_path = v; }},

      {"fem.noise_sd", [](ScenarioConfig& c, const std::string& v) { c.fem.noise_sd = to_double(v); }},
      {"fem.reference_k", [](ScenarioConfig& c, const std::string& v) { c.fem.reference_k = to_uint(v); }},
      {"fem.macqueen_updates_per_point", [](ScenarioConfig& c, const std::string& v) { c.fem.macqueen_updates_per_point = to_uint(v); }},
      {"fem.mesh_seed", [](ScenarioConfig& c, const std::string& v) { c.fem.mesh_seed = to_uint(v); }},
      {"fem.cache_capacity", [](ScenarioConfig& c, const std::string& v) { c.fem.cache_capacity = to_uint(v); }},
      {"fem.true_source", [](ScenarioConfig& c, const std::string& v) {
         const auto xs = to_doubles(v);
         if (xs.size() != 2) throw std::invalid_argument("expected two coordinates");
         c.fem.true_source = {xs[0], xs[1]};
       }},
      {"fem.initial_source", [](ScenarioConfig& c, const std::string& v) {
         const auto xs = to_doubles(v);
         if (xs.size() != 2) throw std::invalid_argument("expected two coordinates");
         c.initial_source = {xs[0], xs[1]};
       }},
      {"fem.initial_theta", [](ScenarioConfig& c, const std::string& v) {
         const auto xs = to_doubles(v);
         if (xs.size() != 4) throw std::invalid_argument("expected four Beta parameters");
         c.initial_theta = {xs[0], xs[1], xs[2], xs[3]};
       }},
  };
  return table;
}

struct Line {
  int number;
  std::string key;  // section.key
  std::string value;
};

}  // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
  std::vector<Line> lines;
  std::string raw, section;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    const auto hash = raw.find_first_of("#;");
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto where = source + ":" + std::to_string(number);
    if (text.front() == '[') {
      if (text.back() != ']') throw ConfigError(where + ": malformed section header '" + text + "'");
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + text + "'");
    if (section.empty()) throw ConfigError(where + ": key '" + trim(text.substr(0, eq)) + "' outside any section");
    const std::string key = section + "." + trim(text.substr(0, eq));
    if (!setters().contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    for (const auto& l : lines) {
      if (l.key == key) throw ConfigError(where + ": duplicate key '" + key + "'");
    }
    lines.push_back({number, key, trim(text.substr(eq + 1))});
  }

  ScenarioId id = ScenarioId::BeamContinuous;
  bool have_id = false;
  for (const auto& l : lines) {
    if (l.key != "scenario.id") continue;
    try {
      id = parse_scenario_id(l.value);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(l.number) + ": key 'scenario.id': " + e.what());
    }
    have_id = true;
  }
  if (!have_id) throw ConfigError(source + ": missing required key 'scenario.id'");

  ScenarioConfig c = default_config(id);
  for (const auto& l : lines) {
    try {
      setters().at(l.key)(c, l.value);
    } catch (const std::exception& e) {
      throw ConfigError(source + ":" + std::to_string(l.number) + ": invalid value '" + l.value +
                        "' for key '" + l.key + "': " + e.what());
    }
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

namespace {

std::string num(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string nums(const double* xs, std::size_t n) {
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += num(xs[i]);
  }
  return out;
}

}  // namespace

std::string render_config(const ScenarioConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "[scenario]\n"
    << "id = " << to_string(c.scenario) << "\n"
    << "layout = " << to_string(c.layout) << "\n"
    << "baseline = " << b(c.baseline) << "\n"
    << "zero_noise = " << b(c.zero_noise) << "\n"
    << "data_seed = " << c.data_seed << "\n"
    << "burn_in = " << num(c.burn_in) << "\n"
    << "chains = " << c.chains << "\n\n";
  o << "[sampler]\n"
    << "iterations = " << c.sampler.n_iterations << "\n"
    << "beta = " << num(c.sampler.beta) << "\n"
    << "zeta = " << num(c.sampler.zeta) << "\n"
    << "seed = " << c.sampler.seed << "\n"
    << "thin = " << c.sampler.thin << "\n"
    << "random_walk_step = " << num(c.sampler.random_walk_step) << "\n"
    << "density_step = " << num(c.sampler.density_step) << "\n"
    << "k_steps = ";
  for (std::size_t i = 0; i < c.sampler.k_proposal.steps.size(); ++i) {
    o << (i ? ", " : "") << c.sampler.k_proposal.steps[i];
  }
  o << "\n\n[prior]\n"
    << "k_mean = " << num(c.k_mean) << "\n"
    << "k = " << c.k << "\n"
    << "k_min = " << c.k_min << "\n"
    << "k_max = " << c.k_max << "\n\n";
  o << "[beam]\n"
    << "mollifier_width = " << num(c.beam.mollifier_width) << "\n"
    << "observation_variance = " << num(c.beam.observation_variance) << "\n"
    << "displacement_scale = " << num(c.beam.displacement_scale) << "\n"
    << "tip_mass = " << num(c.beam.tip_mass) << "\n"
    << "gravity = " << num(c.beam.gravity) << "\n"
    << "reference_k = " << c.beam_reference_k << "\n"
    << "representation_step = " << num(c.representation_step) << "\n\n";
  o << "[sde]\n"
    << "noise_sd = " << num(c.sde.noise_sd) << "\n"
    << "divergence_bound = " << num(c.sde.divergence_bound) << "\n"
    << "drift = " << b(c.sde.drift_enabled) << "\n"
    << "observation_times = " << nums(c.sde.observation_times.data(), c.sde.observation_times.size()) << "\n"
    << "initial_grid = " << c.initial_grid << "\n"
    << "initial_path = " << c.initial_path << "\n\n";
  const double src[2] = {c.fem.true_source.x, c.fem.true_source.y};
  const double init[2] = {c.initial_source.x, c.initial_source.y};
  o << "[fem]\n"
    << "noise_sd = " << num(c.fem.noise_sd) << "\n"
    << "reference_k = " << c.fem.reference_k << "\n"
    << "macqueen_updates_per_point = " << c.fem.macqueen_updates_per_point << "\n"
    << "mesh_seed = " << c.fem.mesh_seed << "\n"
    << "cache_capacity = " << c.fem.cache_capacity << "\n"
    << "true_source = " << nums(src, 2) << "\n"
    << "initial_source = " << nums(init, 2) << "\n"
    << "initial_theta = " << nums(c.initial_theta.data(), 4) << "\n";
  return o.str();
}

void apply_desk_scale(ScenarioConfig& c) { c.sampler.n_iterations /= 10; }

}  // namespace gridlearn
