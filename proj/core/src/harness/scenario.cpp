#include "gridlearn/harness/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <charconv>
#include <cmath>
#include <exception>
#include <thread>

#include "gridlearn/beam.hpp"
#include "gridlearn/fem.hpp"
#include "gridlearn/sde.hpp"

namespace gridlearn {

std::vector<double> beam_sensors(Layout layout) {
  std::vector<double> s;
  for (int i = 0; i < 10; ++i) {
    switch (layout) {
      case Layout::Left: s.push_back(0.25 + 0.5 * i); break;
      case Layout::Right: s.push_back(5.25 + 0.5 * i); break;
      case Layout::Spread: s.push_back(0.5 + 1.0 * i); break;
    }
  }
  return s;
}

Vector beam_discrete_truth() {
  Vector v(5);
  v << 190.0, 213.0, 195.0, 208.0, 200.0;
  return v;
}

double beam_continuous_truth(double x) { return 200.0 + 8.0 * std::sin(1.3 * x); }

namespace {

constexpr std::uint64_t kInitStream = 0x5eed1234abcdULL;

UniformGrid grid_over(double lower, double upper, double step) {
  const auto n = static_cast<std::size_t>(std::llround((upper - lower) / step)) + 1;
  return UniformGrid{lower, step, n};
}

KPrior k_prior_of(const ScenarioConfig& c) {
  if (c.k_mean > 0.0) {
    PoissonK p = make_poisson_k(c.k_mean);
    p.k_min = c.k_min;
    if (c.k_max != 0) p.k_max = c.k_max;
    return p;
  }
  return PointMassK{c.k};
}

void add_output_truth(Problem& p) {
  for (std::size_t i = 0; i < p.obs.sensors.size(); ++i) {
    p.truth.push_back({"G", p.obs.sensors[i].x, p.obs.sensors[i].y,
                       p.reference_output[static_cast<Eigen::Index>(i)]});
  }
}

Problem make_beam(const ScenarioConfig& c) {
  Problem p;
  const auto sensors = beam_sensors(c.layout);
  const double length = c.beam.length;
  YoungsModulusField truth;
  if (c.scenario == ScenarioId::BeamDiscrete) {
    truth = PiecewiseConstantModulus{beam_discrete_truth()};
    p.prior = GaussianVectorPrior{Vector::Constant(5, 200.0), 25.0};
    p.initial_u = FiniteVector{Vector::Constant(5, 200.0)};
  } else {
    const UniformGrid fine = grid_over(0.0, length, 0.01);
    Vector values(static_cast<Eigen::Index>(fine.size));
    for (std::size_t i = 0; i < fine.size; ++i) {
      values[static_cast<Eigen::Index>(i)] = beam_continuous_truth(fine.at(i));
    }
    truth = ContinuousModulus{GridField{fine, values}};
    const UniformGrid rep = grid_over(0.0, length, c.representation_step);
    p.prior = GaussianProcessPrior{200.0, 50.0, 0.5, rep};
    p.initial_u = GridField{rep, Vector::Constant(static_cast<Eigen::Index>(rep.size), 200.0)};
  }
  p.reference_output = beam_reference_output(truth, sensors, c.beam, c.beam_reference_k);
  p.obs = generate_beam_data(truth, sensors, c.beam, c.data_seed, c.beam_reference_k);
  if (c.zero_noise) p.obs.data = p.reference_output;
  p.forward = std::make_shared<BeamForward>(c.beam, sensors);
  p.initial_a = uniform_grid(c.k, c.beam.domain());
  p.kernels.domain = c.beam.domain();
  p.kernels.k_prior = k_prior_of(c);

  const UniformGrid plot = grid_over(0.0, length, 0.1);
  for (std::size_t i = 0; i < plot.size; ++i) {
    p.truth.push_back({"u", plot.at(i), 0.0, modulus_at(truth, plot.at(i), length)});
  }
  add_output_truth(p);
  return p;
}

Problem make_sde(const ScenarioConfig& c) {
  Problem p;
  const auto data = generate_sde_data(c.data_seed, c.sde);
  p.obs = data.obs;
  p.reference_output = data.truth_output;
  if (c.zero_noise) p.obs.data = p.reference_output;
  p.forward = std::make_shared<SdeForward>(c.sde);
  const WienerPrior prior{c.sde.representation};
  p.prior = prior;

  Rng rng(c.sampler.seed ^ kInitStream);
  if (c.initial_path == "prior") {
    p.initial_u = sample_wiener(prior, rng);
  } else {
    p.initial_u = GridField{c.sde.representation,
                            Vector::Zero(static_cast<Eigen::Index>(c.sde.representation.size))};
  }
  if (c.initial_grid == "prior" && !c.baseline) {
    GridBased g;
    const Interval d = c.sde.domain();
    for (std::size_t i = 0; i < c.k; ++i) g.interior_points.push_back(d.lower + d.length() * uniform01(rng));
    std::sort(g.interior_points.begin(), g.interior_points.end());
    p.initial_a = g;
  } else if (c.initial_grid == "window" && !c.baseline) {
    p.initial_a = uniform_grid(c.k, Interval{c.sde.t_start, c.sde.observation_times.back()});
  } else {
    p.initial_a = uniform_grid(c.k, c.sde.domain());
  }
  p.kernels.domain = c.sde.domain();
  p.kernels.k_prior = k_prior_of(c);

  const auto& rep = c.sde.representation;
  for (std::size_t i = 0; i < rep.size; ++i) {
    const Eigen::Index j = static_cast<Eigen::Index>(i);
    p.truth.push_back({"u", rep.at(i), 0.0, data.true_path_input.values[j]});
  }
  for (std::size_t i = 0; i < data.true_solution.nodes.size(); ++i) {
    p.truth.push_back({"z", data.true_solution.nodes[i], 0.0, data.true_solution.values[i]});
  }
  add_output_truth(p);
  return p;
}

Problem make_fem(const ScenarioConfig& c) {
  Problem p;
  const auto data = generate_fem_data(c.data_seed, c.fem, !c.zero_noise);
  p.obs = data.obs;
  p.reference_output = data.truth_output;
  p.reference_mesh = data.reference_mesh;
  p.forward = std::make_shared<FemForward>(c.fem);
  p.prior = UniformBoxPrior{{{0.0, 1.0}, {0.0, 1.0}}};
  p.initial_u = c.initial_source;
  p.initial_a = DensityBased{c.k, c.initial_theta};
  p.kernels.domain = Interval{0.0, 1.0};
  p.kernels.k_prior = PointMassK{c.k};
  p.truth.push_back({"source", c.fem.true_source.x, c.fem.true_source.y, 1.0});
  add_output_truth(p);
  return p;
}

std::vector<double> unknown_values(const UnknownState& u) {
  if (const auto* pt = std::get_if<PlanarPoint>(&u)) return {pt->x, pt->y};
  const Vector& v = coefficients(u);
  return {v.data(), v.data() + v.size()};
}

std::vector<double> unknown_abscissae(const UnknownState& u, double length) {
  if (std::holds_alternative<PlanarPoint>(u)) return {0.0, 1.0};
  if (const auto* f = std::get_if<GridField>(&u)) return f->grid.abscissae();
  const auto n = coefficients(u).size();
  std::vector<double> mid;
  for (Eigen::Index i = 0; i < n; ++i) {
    mid.push_back(length * (static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return mid;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string fmt(double x) { return format_double(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

double density_ratio(const Mesh& mesh) {
  std::size_t top = 0, bottom = 0;
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    if (mesh.boundary[i]) continue;
    const auto& n = mesh.nodes[i];
    if (n.x >= 0.7 && n.y >= 0.7) ++top;
    if (n.x <= 0.3 && n.y <= 0.3) ++bottom;
  }
  if (bottom == 0) return top == 0 ? 1.0 : kInfinity;
  return static_cast<double>(top) / static_cast<double>(bottom);
}

}  // namespace

PushforwardError pushforward_error(const Problem& problem,
                                   const std::vector<const ChainSample*>& samples) {
  if (!problem.reference_mesh) throw ContractError("pushforward error needs a reference mesh");
  if (samples.empty()) return {};
  const FemSystem reference(*problem.reference_mesh);
  std::vector<PlanarPoint> sensors;
  for (const auto& s : problem.obs.sensors) sensors.push_back({s.x, s.y});
  const Eigen::MatrixXd response = reference.response(sensors);
  const auto m = static_cast<Eigen::Index>(sensors.size());
  Vector diff_sum = Vector::Zero(m), sq = Vector::Zero(m);
  for (const auto* smp : samples) {
    const Vector d = smp->predicted - response * dirac_load(reference.mesh(), std::get<PlanarPoint>(smp->u));
    diff_sum += d;
    sq += d.array().square().matrix();
  }
  const double n = static_cast<double>(samples.size());
  return {(diff_sum / n).cwiseAbs().mean(), (sq / n).array().sqrt().mean()};
}

Problem make_problem(const ScenarioConfig& config) {
  config.validate();
  Problem p;
  switch (config.scenario) {
    case ScenarioId::BeamDiscrete:
    case ScenarioId::BeamContinuous: p = make_beam(config); break;
    case ScenarioId::Sde: p = make_sde(config); break;
    case ScenarioId::SourceDetection: p = make_fem(config); break;
  }
  p.config = config;
  return p;
}

std::vector<const ChainSample*> ScenarioResult::posterior_samples() const {
  std::vector<const ChainSample*> out;
  out.reserve(posterior.size());
  for (std::size_t i : posterior) out.push_back(&chain.samples[i]);
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult r;
  r.config = config;
  r.problem = make_problem(config);
  const Problem& p = r.problem;

  Target target(p.obs, *p.forward);
  ChainState initial = make_chain_state(p.initial_u, p.initial_a, target);
  SamplerConfig sc = config.sampler;
  sc.adapt_discretization = !config.baseline;
  r.chain = run_gibbs(std::move(initial), sc, make_unknown_kernel(p.prior), p.kernels, target);

  const double cutoff = config.burn_in * static_cast<double>(r.chain.n_iterations);
  for (std::size_t i = 0; i < r.chain.samples.size(); ++i) {
    if (static_cast<double>(r.chain.samples[i].iteration) >= cutoff) r.posterior.push_back(i);
  }
  const auto post = r.posterior_samples();

  r.acceptance = acceptance_summary(r.chain.tallies);
  std::vector<Vector> predicted, unknowns;
  for (const auto* s : post) {
    predicted.push_back(s->predicted);
    unknowns.push_back(to_vector(unknown_values(s->u)));
  }
  r.error = reconstruction_error(predicted, p.reference_output);

  const bool grid_based = std::holds_alternative<GridBased>(p.initial_a);
  const bool is_beam = config.scenario == ScenarioId::BeamDiscrete ||
                       config.scenario == ScenarioId::BeamContinuous;
  const Interval hist_domain = is_beam ? config.beam.domain() : Interval{0.0, config.sde.horizon};
  if (grid_based) {
    std::vector<GridBased> grids;
    for (const auto* s : post) grids.push_back(std::get<GridBased>(s->a));
    r.histogram = grid_histogram(grids, hist_domain);
  }

  const double length = is_beam ? config.beam.length : 1.0;
  r.bands.push_back({"u", unknown_abscissae(p.initial_u, length), percentile_bands(unknowns)});
  std::vector<double> sensor_axis;
  for (std::size_t i = 0; i < p.obs.sensors.size(); ++i) {
    sensor_axis.push_back(config.scenario == ScenarioId::SourceDetection ? static_cast<double>(i)
                                                                         : p.obs.sensors[i].x);
  }
  r.bands.push_back({"G", sensor_axis, percentile_bands(predicted)});

  std::vector<std::pair<std::string, std::string>>& s = r.summary;
  s.emplace_back("scenario", to_string(config.scenario));
  s.emplace_back("layout", to_string(config.layout));
  s.emplace_back("baseline", config.baseline ? "true" : "false");
  s.emplace_back("iterations", fmt(r.chain.n_iterations));
  s.emplace_back("thin", fmt(config.sampler.thin));
  s.emplace_back("posterior_samples", fmt(post.size()));
  s.emplace_back("acceptance_u", fmt(r.acceptance.u));
  s.emplace_back("acceptance_a", fmt(r.acceptance.a));
  s.emplace_back("acceptance_relocation", fmt(r.acceptance.relocation));
  s.emplace_back("acceptance_dimension", fmt(r.acceptance.dimension));
  s.emplace_back("solver_failures", fmt(r.chain.solver_failures));
  s.emplace_back("reconstruction_error", fmt(r.error.total));
  s.emplace_back("final_potential", fmt(r.chain.final_state.cached_potential));
  double mean_k = 0.0;
  for (const auto* smp : post) mean_k += static_cast<double>(grid_size(smp->a));
  s.emplace_back("mean_k", fmt(post.empty() ? 0.0 : mean_k / static_cast<double>(post.size())));

  if (is_beam && r.histogram) {
    const auto& mc = r.histogram->mean_count;
    const std::size_t half = mc.size() / 2;
    double left = 0.0, right = 0.0;
    for (std::size_t i = 0; i < mc.size(); ++i) (i < half ? left : right) += mc[i];
    s.emplace_back("mean_count_left_half", fmt(left / static_cast<double>(half)));
    s.emplace_back("mean_count_right_half", fmt(right / static_cast<double>(mc.size() - half)));
    s.emplace_back("modal_bucket_first", r.histogram->bucket_label(r.histogram->modal_bucket(0)));
    s.emplace_back("modal_bucket_last",
                   r.histogram->bucket_label(r.histogram->modal_bucket(mc.size() - 1)));
  }

  if (config.scenario == ScenarioId::Sde) {
    const auto& sde = config.sde;
    const double last = sde.observation_times.back();
    double fraction = 0.0;
    for (const auto* smp : post) fraction += fraction_in(std::get<GridBased>(smp->a), 0.0, last);
    s.emplace_back("observed_window_fraction",
                   fmt(post.empty() ? 0.0 : fraction / static_cast<double>(post.size())));

    std::vector<double> axis;
    for (std::size_t i = 0; i < sde.representation.size; ++i) {
      const double t = sde.representation.at(i);
      if (t >= sde.t_start && t <= last) axis.push_back(t);
    }
    std::vector<Vector> paths;
    for (const auto* smp : post) {
      const auto path = euler_maruyama(std::get<GridField>(smp->u), std::get<GridBased>(smp->a), sde, last);
      Vector v(static_cast<Eigen::Index>(axis.size()));
      for (std::size_t i = 0; i < axis.size(); ++i) v[static_cast<Eigen::Index>(i)] = path.at(axis[i]);
      paths.push_back(v);
    }
    if (!paths.empty()) r.bands.push_back({"z", axis, percentile_bands(paths)});

    s.emplace_back("band_coverage", fmt(band_coverage(r.bands[1].bands, p.reference_output)));
  }

  if (config.scenario == ScenarioId::SourceDetection) {
    const auto& ub = r.bands[0].bands;
    const double dx = ub.mean[0] - config.fem.true_source.x;
    const double dy = ub.mean[1] - config.fem.true_source.y;
    s.emplace_back("posterior_mean_x", fmt(ub.mean[0]));
    s.emplace_back("posterior_mean_y", fmt(ub.mean[1]));
    s.emplace_back("posterior_mean_distance", fmt(std::hypot(dx, dy)));
    const auto pf = pushforward_error(p, post);
    s.emplace_back("pushforward_mean_error", fmt(pf.mean));
    s.emplace_back("pushforward_rms_error", fmt(pf.rms));
    const auto& fem = dynamic_cast<const FemForward&>(*p.forward);
    r.final_mesh = fem.mesh_for(std::get<DensityBased>(r.chain.final_state.a));
    s.emplace_back("final_density_ratio", fmt(density_ratio(*r.final_mesh)));
    const auto& th = std::get<DensityBased>(r.chain.final_state.a).theta;
    s.emplace_back("final_theta", fmt(th[0]) + " " + fmt(th[1]) + " " + fmt(th[2]) + " " + fmt(th[3]));
  }

  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// --- artifacts -------------------------------------------------------------

void write_data(const Problem& problem, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  CsvTable data{{"index", "x", "y", "value", "variance"}, {}};
  const auto& obs = problem.obs;
  for (std::size_t i = 0; i < obs.sensors.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    data.add_row({fmt(i), fmt(obs.sensors[i].x), fmt(obs.sensors[i].y), fmt(obs.data[j]),
                  fmt(obs.noise.variances()[j])});
  }
  data.write(dir / "data.csv");
  CsvTable truth{{"quantity", "x", "y", "value"}, {}};
  for (const auto& t : problem.truth) truth.add_row({t.quantity, fmt(t.x), fmt(t.y), fmt(t.value)});
  truth.write(dir / "truth.csv");
}

CsvTable bands_table(const std::vector<NamedBands>& all) {
  CsvTable t{{"quantity", "abscissa", "mean", "p05", "p10", "p50", "p90", "p95"}, {}};
  for (const auto& nb : all) {
    for (std::size_t i = 0; i < nb.abscissae.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      std::vector<std::string> row{nb.quantity, fmt(nb.abscissae[i]), fmt(nb.bands.mean[j])};
      for (Eigen::Index l = 0; l < nb.bands.quantiles.rows(); ++l) row.push_back(fmt(nb.bands.quantiles(l, j)));
      t.add_row(std::move(row));
    }
  }
  return t;
}

NamedBands pooled_prediction_bands(const std::vector<ScenarioResult>& results) {
  if (results.empty()) throw ContractError("no chains to pool");
  std::vector<Vector> predicted;
  for (const auto& r : results) {
    for (const auto* smp : r.posterior_samples()) predicted.push_back(smp->predicted);
  }
  return {"G", results.front().bands.at(1).abscissae, percentile_bands(predicted)};
}

CsvTable summary_table(const ScenarioResult& result) {
  CsvTable t{{"key", "value"}, {}};
  for (const auto& [k, v] : result.summary) t.add_row({k, v});
  return t;
}

CsvTable mesh_table(const Mesh& mesh) {
  CsvTable t{{"kind", "index", "v0", "v1", "v2"}, {}};
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    t.add_row({"node", fmt(i), fmt(mesh.nodes[i].x), fmt(mesh.nodes[i].y),
               mesh.boundary[i] ? "1" : "0"});
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& tr = mesh.triangles[i];
    t.add_row({"triangle", fmt(i), fmt(tr[0]), fmt(tr[1]), fmt(tr[2])});
  }
  return t;
}

void write_artifacts(const ScenarioResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_data(r.problem, dir);
  const auto& samples = r.chain.samples;

  CsvTable cu{{"iteration", "potential"}, {}};
  const std::size_t dim = samples.empty() ? 0 : unknown_values(samples.front().u).size();
  for (std::size_t i = 0; i < dim; ++i) cu.header.push_back("u" + std::to_string(i));
  for (const auto& s : samples) {
    std::vector<std::string> row{fmt(s.iteration), fmt(s.potential)};
    for (double v : unknown_values(s.u)) row.push_back(fmt(v));
    cu.add_row(std::move(row));
  }
  cu.write(dir / "chain_u.csv");

  CsvTable ca{{"iteration", "k"}, {}};
  const bool grid_based = std::holds_alternative<GridBased>(r.problem.initial_a);
  const auto a_rows = r.config.baseline && !samples.empty()
                          ? std::vector<const ChainSample*>{&samples.front()}
                          : [&] {
                              std::vector<const ChainSample*> v;
                              for (const auto& s : samples) v.push_back(&s);
                              return v;
                            }();
  if (grid_based) {
    std::size_t kmax = 0;
    for (const auto* s : a_rows) kmax = std::max(kmax, grid_size(s->a));
    for (std::size_t i = 1; i <= kmax; ++i) ca.header.push_back("p" + std::to_string(i));
    for (const auto* s : a_rows) {
      auto pts = std::get<GridBased>(s->a).interior_points;
      std::sort(pts.begin(), pts.end());
      std::vector<std::string> row{fmt(s->iteration), fmt(pts.size())};
      for (double x : pts) row.push_back(fmt(x));
      row.resize(ca.header.size());
      ca.add_row(std::move(row));
    }
  } else {
    for (const char* h : {"alpha1", "beta1", "alpha2", "beta2"}) ca.header.emplace_back(h);
    for (const auto* s : a_rows) {
      const auto& d = std::get<DensityBased>(s->a);
      ca.add_row({fmt(s->iteration), fmt(d.k), fmt(d.theta[0]), fmt(d.theta[1]), fmt(d.theta[2]),
                  fmt(d.theta[3])});
    }
  }
  ca.write(dir / "chain_a.csv");

  if (r.histogram) {
    const auto& h = *r.histogram;
    CsvTable t{{"bucket"}, {}};
    const double w = h.domain.length() / static_cast<double>(h.bins);
    for (std::size_t j = 0; j < h.bins; ++j) {
      t.header.push_back(fmt(h.domain.lower + w * static_cast<double>(j)) + "-" +
                         fmt(h.domain.lower + w * static_cast<double>(j + 1)));
    }
    for (Eigen::Index row = 0; row < h.probability.rows(); ++row) {
      std::vector<std::string> cells{h.bucket_label(static_cast<std::size_t>(row))};
      for (Eigen::Index j = 0; j < h.probability.cols(); ++j) cells.push_back(fmt(h.probability(row, j)));
      t.add_row(std::move(cells));
    }
    t.write(dir / "grid_histogram.csv");
  }

  bands_table(r.bands).write(dir / "bands.csv");

  summary_table(r).write(dir / "summary.csv");

  CsvTable err{{"sensor", "x", "y", "error"}, {}};
  const auto& sensors = r.problem.obs.sensors;
  for (std::size_t i = 0; i < sensors.size(); ++i) {
    err.add_row({fmt(i), fmt(sensors[i].x), fmt(sensors[i].y),
                 fmt(r.error.per_sensor[static_cast<Eigen::Index>(i)])});
  }
  err.write(dir / "reconstruction_error.csv");

  const bool is_beam = r.config.scenario == ScenarioId::BeamDiscrete ||
                       r.config.scenario == ScenarioId::BeamContinuous;
  if (is_beam) {
    std::vector<double> at4, at8;
    for (const auto& s : samples) {
      const auto field = to_modulus_field(s.u);
      at4.push_back(modulus_at(field, 4.0, r.config.beam.length));
      at8.push_back(modulus_at(field, 8.0, r.config.beam.length));
    }
    const auto m4 = running_mean(at4), m8 = running_mean(at8);
    CsvTable rm{{"iteration", "u_at_4", "u_at_8", "mean_at_4", "mean_at_8"}, {}};
    for (std::size_t i = 0; i < samples.size(); ++i) {
      rm.add_row({fmt(samples[i].iteration), fmt(at4[i]), fmt(at8[i]), fmt(m4[i]), fmt(m8[i])});
    }
    rm.write(dir / "running_means.csv");
  }

  if (r.final_mesh) mesh_table(*r.final_mesh).write(dir / "mesh_final.csv");

  CsvTable timing{{"key", "value"}, {}};
  timing.add_row({"runtime_seconds", fmt(r.runtime_seconds)});
  timing.write(dir / "timing.csv");
}

std::vector<ScenarioResult> run_chains(const ScenarioConfig& config, std::size_t chains,
                                       const std::filesystem::path& dir) {
  if (chains == 0) throw ConfigError("at least one chain is required");
  std::vector<ScenarioResult> results(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto work = [&](std::size_t i) {
    try {
      ScenarioConfig c = config;
      c.sampler.seed = config.sampler.seed + i;
      results[i] = run_scenario(c);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (chains == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < chains; ++i) threads.emplace_back(work, i);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  if (chains == 1) {
    write_artifacts(results[0], dir);
    return results;
  }
  for (std::size_t i = 0; i < chains; ++i) write_artifacts(results[i], dir / ("chain_" + std::to_string(i)));

  CsvTable merged{{"key", "value"}, {}};
  for (std::size_t k = 0; k < results[0].summary.size(); ++k) {
    const auto& key = results[0].summary[k].first;
    double sum = 0.0;
    bool numeric = true;
    for (const auto& r : results) {
      const auto& v = r.summary[k].second;
      double x = 0.0;
      const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc() || p != v.data() + v.size()) {
        numeric = false;
        break;
      }
      sum += x;
    }
    merged.add_row({key, numeric ? fmt(sum / static_cast<double>(chains)) : results[0].summary[k].second});
  }
  merged.add_row({"chains", fmt(chains)});

  const NamedBands pooled = pooled_prediction_bands(results);
  merged.add_row({"pooled_band_coverage",
                  fmt(band_coverage(pooled.bands, results[0].problem.reference_output))});
  merged.write(dir / "summary.csv");
  bands_table({pooled}).write(dir / "pooled_bands.csv");
  return results;
}

}  // namespace gridlearn
