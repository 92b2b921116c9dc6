#include "lognls/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <set>
#include <thread>

#include "lognls/convexity.hpp"
#include "lognls/evolution.hpp"
#include "lognls/io.hpp"
#include "lognls/minimize.hpp"
#include "lognls/model.hpp"
#include "lognls/observables.hpp"
#include "lognls/radial.hpp"

namespace lognls::harness {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

// Strict view of one config object: unknown keys are rejected up front and
// every accessor names the offending key path.
class Section {
 public:
  Section(const Json* j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_) return;
    if (!j_->is_object()) config_error(path_ + " must be an object");
    for (const auto& [key, value] : j_->items()) {
      if (!allowed.count(key)) config_error("unknown key '" + key_path(key) + "'");
    }
  }

  bool present() const { return j_ != nullptr; }
  bool has(const std::string& key) const { return j_ && j_->contains(key); }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const Json* raw(const std::string& key) const { return has(key) ? &j_->at(key) : nullptr; }

  double number(const std::string& key) const {
    if (!has(key)) config_error("missing key '" + key_path(key) + "'");
    const Json& v = j_->at(key);
    if (!v.is_number()) config_error(key_path(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error(key_path(key) + " must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
  std::optional<double> maybe_number(const std::string& key) const {
    return has(key) ? std::optional<double>(number(key)) : std::nullopt;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_->at(key);
    if (!v.is_number_integer()) config_error(key_path(key) + " must be an integer");
    return v.get<long long>();
  }

  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_->at(key);
    if (!v.is_string()) config_error(key_path(key) + " must be a string");
    return v.get<std::string>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_->at(key);
    if (!v.is_boolean()) config_error(key_path(key) + " must be true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) const {
    const Json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) config_error(key_path(key) + " must be a list of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) config_error(key_path(key) + " must be a list of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& key) const {
    const Json* v = raw(key);
    if (!v) return {};
    if (!v->is_array()) config_error(key_path(key) + " must be a list of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) config_error(key_path(key) + " must be a list of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::array<double, 2> pair(const std::string& key, int dim) const {
    const auto v = numbers(key);
    if (!has(key)) return {0.0, 0.0};
    if (static_cast<int>(v.size()) != dim) {
      config_error(key_path(key) + " must have " + std::to_string(dim) + " entr" + (dim == 1 ? "y" : "ies"));
    }
    return {v[0], dim == 2 ? v[1] : 0.0};
  }

  Section sub(const std::string& key, std::set<std::string> allowed) const {
    return Section(raw(key), key_path(key), std::move(allowed));
  }

 private:
  const Json* j_;
  std::string path_;
};

struct Report {
  Json results = Json::object();
  Json assertions = Json::array();
  std::vector<std::string> artifacts;

  void check(const std::string& name, double value, const std::string& relation, double limit, bool pass) {
    Json a = {{"name", name}, {"relation", relation}, {"pass", pass}};
    a["value"] = std::isfinite(value) ? Json(value) : Json(nullptr);
    a["limit"] = std::isfinite(limit) ? Json(limit) : Json(nullptr);
    assertions.push_back(std::move(a));
  }
  void at_most(const std::string& name, double value, double limit) { check(name, value, "<=", limit, value <= limit); }
  void flag(const std::string& name, bool ok) { check(name, ok ? 1.0 : 0.0, "==", 1.0, ok); }
  bool all_pass() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Json& a) { return a["pass"].get<bool>(); });
  }
};

// ---- shared parsing ----

const std::set<std::string> kTopKeys = {"experiment", "model",    "grid",      "time",        "initial",
                                        "perturbation", "outputs", "seed",     "ground",      "minimize",
                                        "convexity",  "contrast", "diagnostics"};

const std::set<std::string> kOutputKeys = {"csv_path",     "summary_json_path",  "snapshot_paths",
                                           "snapshot_times", "profile_csv_path", "aggregate_csv_path",
                                           "cubic_csv_path"};

struct Context {
  const Json& cfg;
  std::string experiment;
  Section top;
  Section outputs;

  Context(const Json& c, const std::string& name, const std::set<std::string>& sections)
      : cfg(c), experiment(name), top(&c, "", kTopKeys), outputs(top.sub("outputs", kOutputKeys)) {
    for (const auto& [key, value] : c.items()) {
      if (key != "experiment" && key != "outputs" && key != "seed" && !sections.count(key)) {
        config_error("key '" + key + "' is not used by experiment '" + name + "'");
      }
    }
  }

  std::optional<std::string> path(const std::string& key) const {
    if (!outputs.has(key)) return std::nullopt;
    const std::string p = outputs.string(key, "");
    if (p.empty()) config_error("outputs." + key + " must be a non-empty path");
    prepare(p, "outputs." + key);
    return p;
  }

  static void prepare(const std::string& p, const std::string& key) {
    const fs::path parent = fs::path(p).parent_path();
    std::error_code ec;
    if (!parent.empty()) fs::create_directories(parent, ec);
    std::ofstream probe(p, std::ios::app);
    if (ec || !probe) config_error(key + ": cannot write '" + p + "'");
  }

  std::vector<std::string> header() const {
    return {"experiment=" + experiment, "config=" + cfg.dump()};
  }
};

ModelParams parse_model(const Context& ctx, bool omega_allowed = true) {
  const Section m = ctx.top.sub("model", {"family", "lambda", "omega"});
  if (!m.present()) config_error("missing key 'model'");
  ModelParams model;
  model.family = family_from_string(m.string("family", "cubic_log_2d"));
  model.lambda = m.number("lambda", 1.0);
  if (!(model.lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "model.lambda must be positive");
  if (m.has("omega")) {
    if (!omega_allowed) config_error("model.omega is not used by experiment '" + ctx.experiment + "'");
    model.omega = m.number("omega");
    require_omega_in_window(model);
  }
  return model;
}

Grid parse_grid(const Context& ctx, const ModelParams& model) {
  const Section g = ctx.top.sub("grid", {"dim", "n", "half_width"});
  if (!g.present()) config_error("missing key 'grid'");
  const int dim = static_cast<int>(g.integer("dim", model.dim()));
  if (dim != model.dim()) config_error("grid.dim does not match model.family");
  const long long n = g.integer("n", 256);
  if (n < 4 || n > (1 << 14)) config_error("grid.n out of range");
  return Grid::make(dim, static_cast<int>(n), g.number("half_width", 20.0));
}

struct TimeSpec {
  double dt;
  double t_final;
  int sample_every;
};

TimeSpec parse_time(const Context& ctx) {
  const Section t = ctx.top.sub("time", {"dt", "t_final", "sample_every"});
  if (!t.present()) config_error("missing key 'time'");
  TimeSpec s{t.number("dt"), t.number("t_final"), static_cast<int>(t.integer("sample_every", 10))};
  if (!(s.dt > 0.0)) config_error("time.dt must be positive");
  if (s.dt > 1e-2) config_error("time.dt must be <= 1e-2");
  if (!(s.t_final > 0.0)) config_error("time.t_final must be positive");
  if (s.sample_every <= 0) config_error("time.sample_every must be positive");
  return s;
}

InitialData parse_initial(const Context& ctx, const ModelParams& model, int dim) {
  const Section probe = ctx.top.sub("initial", {"type", "omega", "center", "phase", "boost", "amplitude", "width", "path"});
  if (!probe.present()) config_error("missing key 'initial'");
  const std::string type = probe.string("type", "");
  if (type == "ground_state") {
    const Section s = ctx.top.sub("initial", {"type", "omega", "center", "phase", "boost"});
    GroundStateInit g;
    if (s.has("omega")) {
      g.omega = s.number("omega");
    } else if (model.omega) {
      g.omega = *model.omega;
    } else {
      throw Error(ErrorCode::MissingOmega, "initial.omega (or model.omega) is required for ground_state data");
    }
    require_omega_in_window(model.with_omega(g.omega));
    g.center = s.pair("center", dim);
    g.phase = s.number("phase", 0.0);
    g.boost = s.pair("boost", dim);
    return g;
  }
  if (type == "gaussian") {
    const Section s = ctx.top.sub("initial", {"type", "amplitude", "width", "center", "boost"});
    GaussianInit g;
    g.amplitude = s.number("amplitude", 1.0);
    g.width = s.number("width", 1.0);
    if (g.amplitude < 0.0) throw Error(ErrorCode::NegativeAmplitude, "initial.amplitude must be >= 0");
    if (!(g.width > 0.0)) config_error("initial.width must be positive");
    g.center = s.pair("center", dim);
    g.boost = s.pair("boost", dim);
    return g;
  }
  if (type == "snapshot") {
    const Section s = ctx.top.sub("initial", {"type", "path"});
    return SnapshotInit{s.string("path", "")};
  }
  config_error("initial.type must be ground_state, gaussian or snapshot");
}

std::optional<Perturbation> parse_perturbation(const Context& ctx, int dim) {
  const Section s = ctx.top.sub("perturbation", {"delta", "mode", "renormalize_mass", "center", "width", "fourier_mode"});
  if (!s.present()) return std::nullopt;
  Perturbation p;
  p.delta = s.number("delta", 1e-2);
  if (p.delta < 0.0) config_error("perturbation.delta must be >= 0");
  p.mode = perturbation_mode_from_string(s.string("mode", "gaussian_bump"));
  p.renormalize_mass = s.boolean("renormalize_mass", false);
  p.bump_center = s.pair("center", dim);
  p.bump_width = s.number("width", 1.0);
  if (!(p.bump_width > 0.0)) config_error("perturbation.width must be positive");
  if (s.has("fourier_mode")) {
    const auto m = s.numbers("fourier_mode");
    if (static_cast<int>(m.size()) != dim) config_error("perturbation.fourier_mode must have one entry per axis");
    for (int a = 0; a < dim; ++a) {
      if (m[a] != std::round(m[a])) config_error("perturbation.fourier_mode entries must be integers");
      p.fourier_mode[a] = static_cast<int>(m[a]);
    }
    if (dim == 1) p.fourier_mode[1] = 0;
  } else if (dim == 1) {
    p.fourier_mode = {2, 0};
  }
  const long long seed = ctx.top.integer("seed", 0);
  if (seed < 0) config_error("seed must be non-negative");
  p.seed = static_cast<std::uint64_t>(seed);
  return p;
}

std::vector<double> snapshot_times(const Context& ctx, std::vector<std::string>& paths) {
  auto times = ctx.outputs.numbers("snapshot_times");
  paths = ctx.outputs.strings("snapshot_paths");
  if (times.size() != paths.size()) config_error("outputs.snapshot_times and outputs.snapshot_paths differ in length");
  if (!std::is_sorted(times.begin(), times.end())) config_error("outputs.snapshot_times must be ascending");
  for (std::size_t i = 0; i < paths.size(); ++i) Context::prepare(paths[i], "outputs.snapshot_paths");
  return times;
}

void write_trajectory_csv(const std::string& path, const Context& ctx, const Trajectory& tr,
                          std::vector<std::string> extra_header = {}) {
  std::vector<std::string> cols = {"t", "mass", "energy", "kinetic", "potential", "px", "py", "quartic", "h1_bound"};
  const bool orbit = !tr.orbit_distances.empty();
  const bool pc = !tr.pc_quantity.empty();
  if (orbit) cols.push_back("orbit_distance");
  if (pc) {
    cols.push_back("pc_quantity");
    cols.push_back("pc_source");
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const auto& o = tr.samples[i];
    std::vector<double> r = {tr.times[i], o.mass,        o.energy,    o.kinetic, o.potential,
                             o.momentum[0], o.momentum[1], o.quartic, tr.h1_bound};
    if (orbit) r.push_back(tr.orbit_distances[i]);
    if (pc) {
      r.push_back(tr.pc_quantity[i]);
      r.push_back(tr.pc_source[i]);
    }
    rows.push_back(std::move(r));
  }
  auto header = ctx.header();
  header.insert(header.end(), extra_header.begin(), extra_header.end());
  write_csv(path, header, cols, rows);
}

double nan_if_absent(const std::optional<double>& v) { return v.value_or(std::numeric_limits<double>::quiet_NaN()); }

// ---- experiments ----

void run_ground(const Json& cfg, Report& rep) {
  const Context ctx(cfg, "ground", {"model", "ground"});
  const ModelParams model = parse_model(ctx);
  model.require_omega();
  const double tol = ctx.top.sub("ground", {"tol"}).number("tol", 1e-10);
  const auto csv = ctx.path("csv_path");

  const RadialProfile p = find_ground_state(model, tol);
  const auto integrals = radial_integrals(p);
  const auto res = pohozaev_residuals(p);
  rep.results["center_value"] = p.center_value;
  rep.results["mass"] = integrals.mass;
  rep.results["action"] = radial_action(p);
  rep.results["pohozaev_r1"] = res.r1;
  rep.results["pohozaev_r2"] = res.r2;
  rep.results["pohozaev_v"] = res.rV;
  rep.results["tail_rate"] = p.tail_rate;
  rep.results["tail_coeff"] = p.tail_coeff;
  rep.results["warnings"] = p.warnings;
  rep.at_most("pohozaev_r1", std::abs(res.r1), 1e-6);
  rep.at_most("pohozaev_r2", std::abs(res.r2), 1e-6);
  rep.at_most("pohozaev_v", std::abs(res.rV), 1e-6);
  if (model.family == Family::CubicLog2D) {
    const double bound = amplitude_roots(model).sqrt_z_omega;
    rep.results["sqrt_z_omega"] = bound;
    rep.check("amplitude_below_sqrt_z_omega", p.center_value, "<", bound, p.center_value < bound);
  }
  if (csv) {
    write_profile_csv(*csv, p, ctx.header());
    rep.artifacts.push_back(*csv);
  }
}

struct EvolveSetup {
  EvolutionConfig config;
  std::shared_ptr<const RadialProfile> profile;
  std::optional<Perturbation> perturbation;
};

EvolveSetup setup_evolution(const Context& ctx, bool need_perturbation) {
  const ModelParams model = parse_model(ctx);
  const Grid grid = parse_grid(ctx, model);
  const TimeSpec time = parse_time(ctx);
  const InitialData init = parse_initial(ctx, model, grid.dim);
  EvolveSetup s;
  s.perturbation = parse_perturbation(ctx, grid.dim);
  if (need_perturbation && !s.perturbation) config_error("missing key 'perturbation'");
  auto prepared = prepare_initial(init, grid, model);
  if (s.perturbation) prepared.field = apply_perturbation(prepared.field, *s.perturbation);
  const Section diag = ctx.top.sub("diagnostics", {"pseudoconformal", "orbit_distance", "blowup_threshold"});
  s.profile = prepared.profile;
  s.config.model = model;
  s.config.grid = grid;
  s.config.dt = time.dt;
  s.config.t_final = time.t_final;
  s.config.sample_every = time.sample_every;
  s.config.initial = std::move(prepared.field);
  if (diag.boolean("orbit_distance", true)) s.config.orbit_reference = s.profile;
  s.config.monitor_pseudoconformal = diag.boolean("pseudoconformal", false);
  s.config.blowup_threshold = diag.maybe_number("blowup_threshold");
  validate(s.config);
  return s;
}

void record_trajectory(Report& rep, const Trajectory& tr, const ModelParams& model) {
  rep.results["samples"] = tr.times.size();
  rep.results["final_time"] = tr.times.empty() ? 0.0 : tr.times.back();
  rep.results["max_mass_drift"] = tr.max_mass_drift;
  rep.results["max_energy_drift"] = tr.max_energy_drift;
  rep.results["max_momentum_drift"] = tr.max_momentum_drift;
  rep.results["blowup_threshold"] = tr.blowup_threshold;
  if (!tr.orbit_distances.empty()) {
    rep.results["max_orbit_distance"] = *std::max_element(tr.orbit_distances.begin(), tr.orbit_distances.end());
  }
  rep.at_most("mass_drift", tr.max_mass_drift, 1e-11);
  if (model.family != Family::PureCubic2D) {
    rep.results["h1_bound"] = tr.h1_bound;
    rep.results["max_bound_excess"] = tr.max_bound_excess;
    rep.at_most("h1_bound_excess", tr.max_bound_excess, 1e-6);
  }
}

void write_snapshots(const Context& ctx, Report& rep, const Trajectory& tr, const std::vector<std::string>& paths) {
  const Json* model = ctx.cfg.contains("model") ? &ctx.cfg["model"] : nullptr;
  const double lambda = model && model->contains("lambda") ? (*model)["lambda"].get<double>() : 1.0;
  const double omega = model && model->contains("omega") && (*model)["omega"].is_number()
                           ? (*model)["omega"].get<double>()
                           : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < paths.size() && i < tr.snapshots.size(); ++i) {
    write_snapshot(paths[i], Snapshot{tr.snapshots[i].second, lambda, omega, tr.snapshots[i].first});
    rep.artifacts.push_back(paths[i]);
  }
}

void run_evolve_like(const Json& cfg, Report& rep, const std::string& name) {
  const bool stability = name == "stability";
  const Context ctx(cfg, name,
                    {"model", "grid", "time", "initial", "perturbation", "diagnostics"});
  EvolveSetup s = setup_evolution(ctx, stability);
  if (stability && !s.profile) config_error("stability needs initial.type = ground_state");
  std::vector<std::string> snap_paths;
  s.config.snapshot_times = snapshot_times(ctx, snap_paths);
  const auto csv = ctx.path("csv_path");

  const Trajectory tr = evolve(s.config);
  record_trajectory(rep, tr, s.config.model);
  if (stability) {
    const double limit = 10.0 * s.perturbation->delta;
    const double worst = *std::max_element(tr.orbit_distances.begin(), tr.orbit_distances.end());
    rep.at_most("orbit_distance", worst, limit);
  }
  if (csv) {
    write_trajectory_csv(*csv, ctx, tr);
    rep.artifacts.push_back(*csv);
  }
  write_snapshots(ctx, rep, tr, snap_paths);
}

void run_minimize(const Json& cfg, Report& rep) {
  const Context ctx(cfg, "minimize", {"model", "grid", "minimize"});
  const ModelParams model = parse_model(ctx, false);
  const Grid grid = parse_grid(ctx, model);
  const Section s = ctx.top.sub("minimize", {"rho", "reference_omega", "tol", "preconditioned", "max_iterations",
                                             "initial_width"});
  if (!s.present()) config_error("missing key 'minimize'");
  if (s.has("rho") == s.has("reference_omega")) config_error("minimize needs exactly one of rho, reference_omega");
  MinimizerOptions opt;
  opt.tol = s.number("tol", 1e-8);
  if (s.has("preconditioned")) opt.preconditioned = s.boolean("preconditioned", false);
  opt.max_iterations = static_cast<int>(s.integer("max_iterations", opt.max_iterations));
  opt.initial_width = s.number("initial_width", opt.initial_width);
  auto snaps = ctx.outputs.strings("snapshot_paths");
  if (snaps.size() > 1) config_error("minimize writes one snapshot; outputs.snapshot_paths has more");
  for (const auto& p : snaps) Context::prepare(p, "outputs.snapshot_paths");

  std::optional<RadialProfile> reference;
  double rho = 0.0;
  if (s.has("reference_omega")) {
    const ModelParams ref = model.with_omega(s.number("reference_omega"));
    require_omega_in_window(ref);
    reference = find_ground_state(ref);
    rho = radial_integrals(*reference).mass;
  } else {
    rho = s.number("rho");
  }
  const MinimizerResult r = minimize_energy(rho, grid, model, opt);
  rep.results["rho"] = rho;
  rep.results["energy"] = r.energy;
  rep.results["lagrange_omega"] = r.lagrange_omega;
  rep.results["residual"] = r.residual;
  rep.results["iterations"] = r.iterations;
  rep.check("energy_negative", r.energy, "<", 0.0, r.energy < 0.0);
  if (reference) {
    const double d = orbit_distance(r.field, *reference).distance;
    const double w = *reference->model.omega;
    rep.results["orbit_distance"] = d;
    rep.at_most("orbit_distance_to_shooting", d, 1e-4);
    rep.at_most("lagrange_omega_error", std::abs(r.lagrange_omega - w), 1e-3);
  }
  if (!snaps.empty()) {
    write_snapshot(snaps[0], Snapshot{r.field, model.lambda, r.lagrange_omega, 0.0});
    rep.artifacts.push_back(snaps[0]);
  }
}

std::vector<double> omega_list(const Context& ctx) {
  const Section m = ctx.top.sub("model", {"family", "lambda", "omega"});
  const Json* w = m.raw("omega");
  if (!w) config_error("missing key 'model.omega'");
  if (w->is_number()) return {m.number("omega")};
  auto v = m.numbers("omega");
  if (v.empty()) config_error("model.omega must not be empty");
  return v;
}

ModelParams model_without_omega(const Context& ctx, Family expected) {
  const Section m = ctx.top.sub("model", {"family", "lambda", "omega"});
  ModelParams model;
  model.family = family_from_string(m.string("family", std::string(to_string(expected))));
  if (model.family != expected) config_error("model.family must be " + std::string(to_string(expected)));
  model.lambda = m.number("lambda", 1.0);
  if (!(model.lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "model.lambda must be positive");
  return model;
}

std::string error_name(const std::exception& e) {
  if (const auto* le = dynamic_cast<const Error*>(&e)) return std::string(to_string(le->code()));
  return "InternalError";
}

void run_sweep_mass(const Json& cfg, Report& rep, int& point_failures) {
  const Context ctx(cfg, "sweep_mass", {"model", "ground"});
  const ModelParams model = model_without_omega(ctx, Family::CubicLog2D);
  const auto omegas = omega_list(ctx);
  const double tol = ctx.top.sub("ground", {"tol"}).number("tol", 1e-10);
  const auto csv = ctx.path("csv_path");

  const double mass_q = mass_asymptotics_sweep(model.lambda, {}, tol).mass_q;
  rep.results["mass_q"] = mass_q;
  Json rows = Json::array();
  std::vector<std::string> lines;
  std::vector<MassAsymptoticsRow> ok;
  for (double w : omegas) {
    try {
      const auto r = mass_asymptotics_sweep(model.lambda, {w}, tol).rows.at(0);
      ok.push_back(r);
      rows.push_back({{"omega", r.omega}, {"mass", r.mass}, {"ratio", r.ratio}, {"ratio_log", r.ratio_log}});
      lines.push_back(fmt17(r.omega) + "," + fmt17(r.mass) + "," + fmt17(r.ratio) + "," + fmt17(r.ratio_log) + ",");
    } catch (const std::exception& e) {
      const auto* le = dynamic_cast<const Error*>(&e);
      point_failures = std::max(point_failures, le ? exit_code_for(le->code()) : int(kNumericalFailure));
      rows.push_back({{"omega", w}, {"error", error_name(e)}, {"message", e.what()}});
      lines.push_back(fmt17(w) + ",,,," + error_name(e));
    }
  }
  rep.results["rows"] = rows;
  // Trends are judged along decreasing ω.
  auto by_omega = ok;
  std::sort(by_omega.begin(), by_omega.end(), [](auto& a, auto& b) { return a.omega > b.omega; });
  bool mass_dec = by_omega.size() >= 2, ratio_dec = by_omega.size() >= 2, log_dec = by_omega.size() >= 2;
  for (std::size_t i = 1; i < by_omega.size(); ++i) {
    mass_dec = mass_dec && by_omega[i].mass < by_omega[i - 1].mass;
    ratio_dec = ratio_dec && std::abs(by_omega[i].ratio - 1) < std::abs(by_omega[i - 1].ratio - 1);
    log_dec = log_dec && std::abs(by_omega[i].ratio_log - 1) < std::abs(by_omega[i - 1].ratio_log - 1);
  }
  rep.flag("mass_strictly_decreasing", mass_dec);
  rep.flag("sqrt_log_ratio_error_decreasing", ratio_dec);
  rep.results["log_ratio_error_decreasing"] = log_dec;
  if (csv) {
    std::string out;
    for (const auto& h : ctx.header()) out += "# " + h + "\n";
    out += "# mass_q=" + fmt17(mass_q) + "\nomega,mass,ratio,ratio_log,error\n";
    for (const auto& l : lines) out += l + "\n";
    std::ofstream(*csv, std::ios::binary) << out;
    rep.artifacts.push_back(*csv);
  }
}

void run_convexity(const Json& cfg, Report& rep) {
  const Context ctx(cfg, "convexity1d", {"model", "convexity"});
  const ModelParams model = model_without_omega(ctx, Family::QuinticLog1D);
  const auto omegas = omega_list(ctx);
  const Section s = ctx.top.sub("convexity", {"n_nodes", "compare_shooting"});
  const int n_nodes = static_cast<int>(s.integer("n_nodes", 4001));
  const bool compare = s.boolean("compare_shooting", true);
  const auto csv = ctx.path("csv_path");
  const auto profile_csv = ctx.path("profile_csv_path");

  const ConvexityScan scan = action_convexity_scan(model.lambda, omegas);
  rep.results["rows"] = Json::array();
  for (const auto& r : scan.rows) {
    rep.results["rows"].push_back({{"omega", r.omega},
                                   {"dpp_quad", r.dpp_quad},
                                   {"dpp_general_raw", r.dpp_general},
                                   {"dpp_simplified", r.dpp_simplified},
                                   {"simplified_over_general", r.dpp_simplified / r.dpp_general},
                                   {"dpp_fd", r.dpp_fd ? Json(*r.dpp_fd) : Json(nullptr)},
                                   {"mass", r.mass},
                                   {"action", r.action}});
  }
  rep.flag("dpp_positive", scan.all_positive);
  rep.flag("mass_increasing", scan.mass_increasing);
  rep.flag("fd_sign_agrees", scan.signs_agree);
  rep.at_most("dpp_fd_relative_error", scan.max_fd_rel_error, 1e-2);

  if (compare) {
    double worst = 0.0, amp = 0.0;
    for (double w : omegas) {
      const Profile1D q = ground_state_1d_quadrature(model.lambda, w, n_nodes);
      const RadialProfile shot = find_ground_state(model.with_omega(w));
      const double a = find_turning_point(model.lambda, w).a;
      amp = std::max({amp, std::abs(q.phi_max * q.phi_max - a), std::abs(shot.center_value * shot.center_value - a)});
      for (std::size_t i = 0; i < q.x_nodes.size(); ++i) {
        const double x = std::abs(q.x_nodes[i]);
        if (x <= shot.last_node()) worst = std::max(worst, std::abs(shot.value_at(x) - q.values[i]));
      }
    }
    rep.at_most("quadrature_vs_shooting", worst, 1e-8);
    rep.at_most("phi_max_squared_vs_a", amp, 1e-10);
  }
  if (csv) {
    std::vector<std::vector<double>> rows;
    for (const auto& r : scan.rows) {
      rows.push_back({r.omega, r.dpp_quad, r.dpp_simplified, nan_if_absent(r.dpp_fd), r.mass, r.action,
                      r.dpp_general, nan_if_absent(r.dpp_fd_half)});
    }
    write_csv(*csv, ctx.header(),
              {"omega", "dpp_quad", "dpp_simplified", "dpp_fd", "mass", "action", "dpp_general_raw", "dpp_fd_half"},
              rows);
    rep.artifacts.push_back(*csv);
  }
  if (profile_csv) {
    const Profile1D q = ground_state_1d_quadrature(model.lambda, omegas.front(), n_nodes);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < q.x_nodes.size(); ++i) rows.push_back({q.x_nodes[i], q.values[i]});
    auto header = ctx.header();
    header.push_back("omega=" + fmt17(q.omega));
    header.push_back("phi_max=" + fmt17(q.phi_max));
    write_csv(*profile_csv, header, {"x", "phi"}, rows);
    rep.artifacts.push_back(*profile_csv);
  }
}

void run_contrast(const Json& cfg, Report& rep) {
  const Context ctx(cfg, "contrast_blowup", {"model", "grid", "time", "initial", "contrast"});
  const ModelParams log_model = model_without_omega(ctx, Family::CubicLog2D);
  const ModelParams cubic{Family::PureCubic2D, log_model.lambda, std::nullopt};
  const Grid grid = parse_grid(ctx, log_model);
  const TimeSpec time = parse_time(ctx);
  const InitialData init = parse_initial(ctx, log_model, grid.dim);
  if (!std::holds_alternative<GaussianInit>(init)) config_error("contrast_blowup needs initial.type = gaussian");
  const Section c = ctx.top.sub("contrast", {"t_final_cubic", "blowup_threshold"});
  const double t_cubic = c.number("t_final_cubic", 5.0);
  const auto csv = ctx.path("csv_path");
  const auto cubic_csv = ctx.path("cubic_csv_path");

  const ComplexField u0 = prepare_initial(init, grid, log_model).field;
  const Observables cubic_obs = observables(u0, cubic);
  const double mass_q = mass_asymptotics_sweep(log_model.lambda, {}).mass_q;
  rep.results["cubic_energy"] = cubic_obs.energy;
  rep.results["mass"] = cubic_obs.mass;
  rep.results["townes_mass"] = mass_q;
  rep.check("cubic_energy_negative", cubic_obs.energy, "<", 0.0, cubic_obs.energy < 0.0);

  EvolutionConfig ec;
  ec.model = cubic;
  ec.grid = grid;
  ec.dt = time.dt;
  ec.t_final = t_cubic;
  ec.sample_every = time.sample_every;
  ec.initial = u0;
  ec.throw_on_abort = false;
  ec.blowup_threshold = c.maybe_number("blowup_threshold");
  const Trajectory cub = evolve(ec);
  const bool blew_up = cub.aborted && *cub.aborted == ErrorCode::BlowUpDetected;
  rep.results["cubic_blowup_time"] = blew_up ? Json(cub.abort_time) : Json(nullptr);
  rep.results["blowup_threshold"] = cub.blowup_threshold;
  rep.check("cubic_blowup_before", blew_up ? cub.abort_time : t_cubic, "<", t_cubic, blew_up && cub.abort_time < t_cubic);

  ec.model = log_model;
  ec.t_final = time.t_final;
  const Trajectory lg = evolve(ec);
  rep.flag("log_run_completed", !lg.aborted);
  double max_grad = 0.0;
  for (const auto& o : lg.samples) max_grad = std::max(max_grad, o.T());
  rep.results["log_max_gradient_norm_sq"] = max_grad;
  rep.results["log_final_time"] = lg.times.back();
  rep.results["h1_bound"] = lg.h1_bound;
  rep.at_most("log_h1_bound_excess", lg.max_bound_excess, 1e-6);
  rep.at_most("log_mass_drift", lg.max_mass_drift, 1e-11);
  if (csv) {
    write_trajectory_csv(*csv, ctx, lg, {"family=cubic_log_2d"});
    rep.artifacts.push_back(*csv);
  }
  if (cubic_csv) {
    write_trajectory_csv(*cubic_csv, ctx, cub, {"family=pure_cubic_2d"});
    rep.artifacts.push_back(*cubic_csv);
  }
}

void run_pseudoconformal(const Json& cfg, Report& rep) {
  const Context ctx(cfg, "pseudoconformal", {"model", "grid", "time", "initial"});
  EvolveSetup s = setup_evolution(ctx, false);
  s.config.monitor_pseudoconformal = true;
  s.config.orbit_reference = nullptr;
  const auto csv = ctx.path("csv_path");

  const Trajectory coarse = evolve(s.config);
  EvolutionConfig half = s.config;
  half.dt = 0.5 * s.config.dt;
  const Trajectory fine = evolve(half);
  const double r1 = pseudoconformal_residual(coarse);
  const double r2 = pseudoconformal_residual(fine);
  rep.results["residual_dt"] = r1;
  rep.results["residual_half_dt"] = r2;
  rep.results["reduction"] = r1 / r2;
  const double rhs0 = coarse.times[0] * coarse.pc_source[0];
  rep.results["rhs_at_t0"] = rhs0;
  rep.at_most("pc_residual", r1, 1e-4);
  rep.check("pc_reduction_on_halving", r1 / r2, ">=", 3.0, r1 / r2 >= 3.0);
  rep.check("rhs_zero_at_t0", rhs0, "==", 0.0, rhs0 == 0.0);
  record_trajectory(rep, coarse, s.config.model);
  if (csv) {
    write_trajectory_csv(*csv, ctx, coarse);
    rep.artifacts.push_back(*csv);
    fs::path half_path(*csv);
    half_path.replace_filename(half_path.stem().string() + "_half" + half_path.extension().string());
    write_trajectory_csv(half_path.string(), ctx, fine);
    rep.artifacts.push_back(half_path.string());
  }
}

// ---- dispatch, sweeps and summaries ----

std::string experiment_of(const Json& cfg) {
  if (!cfg.is_object()) config_error("config must be a JSON object");
  if (!cfg.contains("experiment")) config_error("missing key 'experiment'");
  if (!cfg["experiment"].is_string()) config_error("experiment must be a string");
  const auto name = cfg["experiment"].get<std::string>();
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) config_error("unknown experiment '" + name + "'");
  return name;
}

Outcome run_single(const Json& cfg) {
  Outcome out;
  Report rep;
  int point_failures = 0;
  Json summary = Json::object();
  try {
    const std::string name = experiment_of(cfg);
    summary["experiment"] = name;
    if (name == "ground") run_ground(cfg, rep);
    else if (name == "evolve" || name == "stability") run_evolve_like(cfg, rep, name);
    else if (name == "minimize") run_minimize(cfg, rep);
    else if (name == "sweep_mass") run_sweep_mass(cfg, rep, point_failures);
    else if (name == "convexity1d") run_convexity(cfg, rep);
    else if (name == "contrast_blowup") run_contrast(cfg, rep);
    else run_pseudoconformal(cfg, rep);
    out.exit_code = point_failures ? point_failures : rep.all_pass() ? kPass : kAssertionFailed;
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.code());
    summary["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
  } catch (const nlohmann::json::exception& e) {
    out.exit_code = kConfigError;
    summary["error"] = {{"code", "ConfigError"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    out.exit_code = kNumericalFailure;
    summary["error"] = {{"code", "InternalError"}, {"message", e.what()}};
  }
  summary["exit_code"] = out.exit_code;
  summary["status"] = out.exit_code == kPass ? "pass" : out.exit_code == kAssertionFailed ? "fail" : "error";
  summary["results"] = rep.results;
  summary["assertions"] = rep.assertions;
  summary["artifacts"] = rep.artifacts;
  out.summary = std::move(summary);
  out.artifacts = rep.artifacts;
  return out;
}

const std::vector<std::string> kSweepable = {"/model/lambda",   "/model/omega",        "/grid/n",
                                             "/grid/half_width", "/time/dt",           "/time/t_final",
                                             "/perturbation/delta", "/perturbation/mode", "/initial/omega",
                                             "/initial/amplitude", "/initial/width",    "/minimize/rho",
                                             "/seed"};

std::string suffixed(const std::string& path, std::size_t index) {
  fs::path p(path);
  p.replace_filename(p.stem().string() + "_" + std::to_string(index) + p.extension().string());
  return p.string();
}

Json point_config(const Json& cfg, const Json::json_pointer& ptr, const Json& value, std::size_t index) {
  Json c = cfg;
  c[ptr] = value;
  if (c.contains("outputs") && c["outputs"].is_object()) {
    Json& o = c["outputs"];
    o.erase("aggregate_csv_path");
    for (auto& [key, v] : o.items()) {
      if (v.is_string()) v = suffixed(v.get<std::string>(), index);
      if (key == "snapshot_paths" && v.is_array()) {
        for (auto& e : v)
          if (e.is_string()) e = suffixed(e.get<std::string>(), index);
      }
    }
  }
  return c;
}

std::string cell(const Json& v) {
  if (v.is_number()) return fmt17(v.get<double>());
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_string()) return v.get<std::string>();
  return "";
}

Outcome run_sweep(const Json& cfg, const std::string& pointer) {
  const Json::json_pointer ptr(pointer);
  const Json values = cfg[ptr];
  if (values.empty()) config_error(pointer.substr(1) + " sweep list is empty");

  std::vector<Outcome> points(values.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), values.size()));
  if (workers > 1) {
    std::vector<std::future<Outcome>> futures;
    for (std::size_t i = 0; i < values.size(); ++i) {
      futures.push_back(std::async(std::launch::async, [&, i] { return run_single(point_config(cfg, ptr, values[i], i)); }));
      if (futures.size() == workers || i + 1 == values.size()) {
        const std::size_t base = i + 1 - futures.size();
        for (std::size_t k = 0; k < futures.size(); ++k) points[base + k] = futures[k].get();
        futures.clear();
      }
    }
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) points[i] = run_single(point_config(cfg, ptr, values[i], i));
  }

  Outcome out;
  Json summary = Json::object();
  summary["experiment"] = cfg.value("experiment", "");
  summary["sweep"] = {{"parameter", pointer.substr(1)}, {"values", values}};
  summary["points"] = Json::array();
  int worst = kPass;
  for (auto& p : points) {
    if (p.exit_code != kPass) worst = std::max(worst, p.exit_code);
    out.artifacts.insert(out.artifacts.end(), p.artifacts.begin(), p.artifacts.end());
    summary["points"].push_back(p.summary);
  }

  // Aggregate rows in input order; columns from the first successful point.
  std::vector<std::string> keys;
  for (const auto& p : points) {
    if (p.summary.contains("error")) continue;
    for (const auto& [k, v] : p.summary["results"].items())
      if (v.is_number() || v.is_boolean()) keys.push_back(k);
    break;
  }
  std::string agg_path;
  if (cfg.contains("outputs") && cfg["outputs"].contains("aggregate_csv_path")) {
    agg_path = cfg["outputs"]["aggregate_csv_path"].get<std::string>();
  } else if (cfg.contains("outputs") && cfg["outputs"].contains("csv_path")) {
    fs::path p(cfg["outputs"]["csv_path"].get<std::string>());
    p.replace_filename(p.stem().string() + "_aggregate" + p.extension().string());
    agg_path = p.string();
  }
  if (!agg_path.empty()) {
    Context::prepare(agg_path, "outputs.aggregate_csv_path");
    std::string text = "# experiment=" + cfg.value("experiment", "") + "\n# config=" + cfg.dump() + "\n";
    text += "index," + pointer.substr(pointer.rfind('/') + 1) + ",exit_code,error";
    for (const auto& k : keys) text += "," + k;
    text += "\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
      const Json& s = points[i].summary;
      text += std::to_string(i) + "," + cell(values[i]) + "," + std::to_string(points[i].exit_code) + ",";
      if (s.contains("error")) text += s["error"]["code"].get<std::string>();
      for (const auto& k : keys) text += "," + (s["results"].contains(k) ? cell(s["results"][k]) : "");
      text += "\n";
    }
    std::ofstream(agg_path, std::ios::binary) << text;
    out.artifacts.push_back(agg_path);
  }
  out.exit_code = worst;
  summary["exit_code"] = worst;
  summary["status"] = worst == kPass ? "pass" : worst == kAssertionFailed ? "fail" : "error";
  summary["artifacts"] = out.artifacts;
  out.summary = std::move(summary);
  return out;
}

std::optional<std::string> sweep_parameter(const Json& cfg, const std::string& experiment) {
  std::vector<std::string> lists;
  for (const auto& p : kSweepable) {
    if (p == "/model/omega" && (experiment == "sweep_mass" || experiment == "convexity1d")) continue;
    const Json::json_pointer ptr(p);
    if (cfg.contains(ptr) && cfg[ptr].is_array()) lists.push_back(p);
  }
  if (lists.size() > 1) config_error("at most one parameter may be a list; found " + lists[0].substr(1) + " and " + lists[1].substr(1));
  if (lists.empty()) return std::nullopt;
  return lists[0];
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"ground",     "evolve",      "stability",       "minimize",
                                                 "sweep_mass", "convexity1d", "contrast_blowup", "pseudoconformal"};
  return names;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::OmegaOutOfWindow:
    case ErrorCode::MissingOmega:
    case ErrorCode::NonPositiveLambda:
    case ErrorCode::NegativeAmplitude:
    case ErrorCode::NonPositiveB:
    case ErrorCode::NonPositiveRho:
    case ErrorCode::GridTooSmall:
    case ErrorCode::OmegaTooCloseToEdge:
    case ErrorCode::SizeMismatch:
    case ErrorCode::IoError:
      return kConfigError;
    default:
      return kNumericalFailure;
  }
}

Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ConfigError, "cannot read config '" + path + "'");
  try {
    return Json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path + ": " + e.what());
  }
}

Outcome run(const Json& config) {
  Outcome out;
  std::optional<std::string> sweep;
  try {
    const std::string name = experiment_of(config);
    sweep = sweep_parameter(config, name);
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.code());
    out.summary = {{"exit_code", out.exit_code},
                   {"status", "error"},
                   {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
    return out;
  }
  out = sweep ? run_sweep(config, *sweep) : run_single(config);
  if (config.contains("outputs") && config["outputs"].is_object() && config["outputs"].contains("summary_json_path") &&
      config["outputs"]["summary_json_path"].is_string()) {
    const std::string path = config["outputs"]["summary_json_path"].get<std::string>();
    try {
      Context::prepare(path, "outputs.summary_json_path");
      std::ofstream(path, std::ios::binary) << out.summary.dump(2) << "\n";
    } catch (const Error& e) {
      out.exit_code = kConfigError;
      out.summary["exit_code"] = out.exit_code;
      out.summary["status"] = "error";
      out.summary["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    }
  }
  return out;
}

}  // namespace lognls::harness
