#include "lognls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "lognls/io.hpp"

namespace lognls {

SplitStepper::SplitStepper(const Grid& grid, const ModelParams& model, double dt)
    : grid_(grid), model_(model), dt_(dt), half_linear_(grid.size()) {
  const auto k2 = wavenumber_squared(grid);
  // The backward transform is unscaled; fold 1/N^dim into the multiplier.
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < k2.size(); ++i) half_linear_[i] = std::polar(scale, -0.25 * k2[i] * dt);
}

void SplitStepper::step(ComplexField& field) const {
  auto data = field.values();
  auto half = [&] {
    forward_in_place(grid_, data);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= half_linear_[i];
    inverse_unscaled_in_place(grid_, data);
  };
  half();
  for (auto& v : data) v *= std::polar(1.0, -dt_ * phase_rate(std::norm(v), model_));
  half();
}

ComplexField strang_step(const ComplexField& field, double dt, const ModelParams& model) {
  require_finite(field, "strang_step");
  ComplexField out = field;
  SplitStepper(field.grid(), model, dt).step(out);
  require_finite(out, "strang_step");
  return out;
}

Complex free_gaussian(double amplitude, double width, const double* x, int dim, double t) {
  const Complex sigma(width * width, t);
  double r2 = 0.0;
  for (int a = 0; a < dim; ++a) r2 += x[a] * x[a];
  const Complex pref = std::pow(width * width / sigma, 0.5 * dim);
  return amplitude * pref * std::exp(-r2 / (2.0 * sigma));
}

namespace {

std::vector<double> h1_weights(const Grid& grid) {
  auto w = wavenumber_squared(grid);
  for (auto& v : w) v += 1.0;
  return w;
}

double parabolic_offset(double fm, double f0, double fp) {
  const double den = fm - 2.0 * f0 + fp;
  if (den >= 0.0) return 0.0;
  return std::clamp(0.5 * (fm - fp) / den, -0.5, 0.5);
}

}  // namespace

double h1_norm_sq(const ComplexField& field) {
  const auto spec = transform(field);
  const auto w = h1_weights(field.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) s += w[i] * std::norm(spec[i]);
  return s * field.grid().cell_volume() / static_cast<double>(field.size());
}

OrbitMeter::OrbitMeter(const RadialProfile& profile, const Grid& grid) : grid_(grid) {
  ref_hat_ = transform(embed_radial(profile, grid));
  weight_ = h1_weights(grid);
  const double norm = grid.cell_volume() / static_cast<double>(grid.size());
  for (std::size_t i = 0; i < ref_hat_.size(); ++i) ref_norm_sq_ += weight_[i] * std::norm(ref_hat_[i]);
  ref_norm_sq_ *= norm;
}

OrbitResult OrbitMeter::measure(const ComplexField& field) const {
  if (!(field.grid() == grid_)) throw Error(ErrorCode::SizeMismatch, "orbit_distance: grid mismatch");
  require_finite(field, "orbit_distance");
  const int n = grid_.n;
  const int dim = grid_.dim;
  const double dx = grid_.cell();
  const double norm = grid_.cell_volume() / static_cast<double>(grid_.size());
  const auto uhat = transform(field);

  // H¹ cross-correlation over all grid shifts.
  std::vector<Complex> corr(uhat.size());
  for (std::size_t i = 0; i < corr.size(); ++i) corr[i] = weight_[i] * uhat[i] * std::conj(ref_hat_[i]);
  inverse_unscaled_in_place(grid_, corr);
  std::size_t best = 0;
  for (std::size_t i = 1; i < corr.size(); ++i) {
    if (std::abs(corr[i]) > std::abs(corr[best])) best = i;
  }
  int idx[2] = {static_cast<int>(dim == 1 ? best : best / n), static_cast<int>(dim == 1 ? 0 : best % n)};
  auto at = [&](int i, int j) {
    i = (i % n + n) % n;
    j = (j % n + n) % n;
    return std::abs(corr[dim == 1 ? static_cast<std::size_t>(i) : static_cast<std::size_t>(i) * n + j]);
  };
  std::array<double, 2> grid_shift{}, refined{};
  for (int a = 0; a < dim; ++a) {
    const int m = idx[a] < n / 2 ? idx[a] : idx[a] - n;
    grid_shift[a] = m * dx;
    const double fm = a == 0 ? at(idx[0] - 1, idx[1]) : at(idx[0], idx[1] - 1);
    const double fp = a == 0 ? at(idx[0] + 1, idx[1]) : at(idx[0], idx[1] + 1);
    refined[a] = grid_shift[a] + parabolic_offset(fm, at(idx[0], idx[1]), fp) * dx;
  }

  const auto k = grid_.wavenumbers();
  auto evaluate = [&](const std::array<double, 2>& y) {
    std::vector<Complex> ex(n), ey(n, Complex(1.0, 0.0));
    for (int i = 0; i < n; ++i) {
      ex[i] = std::polar(1.0, -k[i] * y[0]);
      if (dim == 2) ey[i] = std::polar(1.0, -k[i] * y[1]);
    }
    auto shifted = [&](std::size_t i) {
      if (dim == 1) return ref_hat_[i] * ex[i];
      return ref_hat_[i] * ex[i / n] * ey[i % n];
    };
    Complex c(0.0, 0.0);
    for (std::size_t i = 0; i < uhat.size(); ++i) c += weight_[i] * uhat[i] * std::conj(shifted(i));
    const Complex rot = c == Complex(0.0, 0.0) ? Complex(1.0, 0.0) : c / std::abs(c);
    double d2 = 0.0;
    for (std::size_t i = 0; i < uhat.size(); ++i) d2 += weight_[i] * std::norm(uhat[i] - rot * shifted(i));
    OrbitResult r;
    r.distance = std::sqrt(d2 * norm);
    r.theta = std::arg(rot);
    r.shift = y;
    return r;
  };
  const OrbitResult a = evaluate(grid_shift);
  if (refined == grid_shift) return a;
  const OrbitResult b = evaluate(refined);
  return b.distance < a.distance ? b : a;
}

OrbitResult orbit_distance(const ComplexField& field, const RadialProfile& profile) {
  return OrbitMeter(profile, field.grid()).measure(field);
}

std::string_view to_string(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::GaussianBump: return "gaussian_bump";
    case PerturbationMode::Fourier: return "fourier";
    case PerturbationMode::Scale: return "scale";
  }
  return "unknown";
}

PerturbationMode perturbation_mode_from_string(std::string_view name) {
  if (name == "gaussian_bump") return PerturbationMode::GaussianBump;
  if (name == "fourier") return PerturbationMode::Fourier;
  if (name == "scale") return PerturbationMode::Scale;
  throw Error(ErrorCode::ConfigError, "perturbation.mode: unknown mode '" + std::string(name) + "'");
}

ComplexField apply_perturbation(const ComplexField& u, const Perturbation& p) {
  require_finite(u, "apply_perturbation");
  if (!(p.delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation.delta must be >= 0");
  const Grid& g = u.grid();
  ComplexField v(g);
  double x[2] = {0.0, 0.0};
  switch (p.mode) {
    case PerturbationMode::GaussianBump:
      for (std::size_t i = 0; i < v.size(); ++i) {
        coordinates_of(g, i, x);
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += (x[a] - p.bump_center[a]) * (x[a] - p.bump_center[a]);
        v[i] = u[i] * std::exp(-r2 / (2.0 * p.bump_width * p.bump_width));
      }
      break;
    case PerturbationMode::Fourier: {
      std::mt19937_64 rng(p.seed);
      const double phase = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
      const double base = std::numbers::pi / g.half_width;
      for (std::size_t i = 0; i < v.size(); ++i) {
        coordinates_of(g, i, x);
        double arg = phase;
        for (int a = 0; a < g.dim; ++a) arg += base * p.fourier_mode[a] * x[a];
        v[i] = std::polar(1.0, arg);
      }
      break;
    }
    case PerturbationMode::Scale:
      v = u;
      break;
  }
  const double vn = std::sqrt(h1_norm_sq(v));
  if (!(vn > 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation direction vanishes");
  ComplexField out = u;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += (p.delta / vn) * v[i];
  if (p.renormalize_mass) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
      m0 += std::norm(u[i]);
      m1 += std::norm(out[i]);
    }
    const double s = std::sqrt(m0 / m1);
    for (auto& val : out.values()) val *= s;
  }
  return out;
}

PreparedInitial prepare_initial(const InitialData& init, const Grid& grid, const ModelParams& model,
                                double ground_tol) {
  if (grid.dim != model.dim()) throw Error(ErrorCode::InvalidArgument, "grid.dim does not match the model");
  auto apply_boost = [&](ComplexField& f, const std::array<double, 2>& v) {
    if (v[0] == 0.0 && v[1] == 0.0) return;
    double x[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) {
      coordinates_of(grid, i, x);
      double arg = 0.0;
      for (int a = 0; a < grid.dim; ++a) arg += v[a] * x[a];
      f[i] *= std::polar(1.0, arg);
    }
  };

  if (const auto* gs = std::get_if<GroundStateInit>(&init)) {
    auto profile = std::make_shared<RadialProfile>(find_ground_state(model.with_omega(gs->omega), ground_tol));
    ComplexField f = embed_radial(*profile, grid, gs->center, gs->phase);
    apply_boost(f, gs->boost);
    return {std::move(f), std::move(profile)};
  }
  if (const auto* ga = std::get_if<GaussianInit>(&init)) {
    if (!(ga->width > 0.0)) throw Error(ErrorCode::InvalidArgument, "initial.width must be positive");
    ComplexField f(grid);
    double x[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < f.size(); ++i) {
      coordinates_of(grid, i, x);
      double r2 = 0.0;
      for (int a = 0; a < grid.dim; ++a) r2 += (x[a] - ga->center[a]) * (x[a] - ga->center[a]);
      f[i] = ga->amplitude * std::exp(-r2 / (2.0 * ga->width * ga->width));
    }
    apply_boost(f, ga->boost);
    return {std::move(f), nullptr};
  }
  const auto& snap = std::get<SnapshotInit>(init);
  Snapshot s = read_snapshot(snap.path);
  if (!(s.field.grid() == grid)) throw Error(ErrorCode::SizeMismatch, snap.path + ": snapshot grid differs from config grid");
  return {std::move(s.field), nullptr};
}

void validate(const EvolutionConfig& c) {
  if (!(std::abs(c.dt) > 0.0) || (c.dt < 0.0 && !c.allow_negative_dt)) {
    throw Error(ErrorCode::InvalidArgument, "time.dt must be positive");
  }
  if (std::abs(c.dt) > 1e-2) throw Error(ErrorCode::InvalidArgument, "time.dt must be <= 1e-2");
  if (!(c.t_final > 0.0)) throw Error(ErrorCode::InvalidArgument, "time.t_final must be positive");
  if (c.sample_every <= 0) throw Error(ErrorCode::InvalidArgument, "time.sample_every must be positive");
  if (!c.initial) throw Error(ErrorCode::InvalidArgument, "evolution needs an initial field");
  if (!(c.initial->grid() == c.grid)) throw Error(ErrorCode::SizeMismatch, "initial field grid differs");
  if (c.grid.dim != c.model.dim()) throw Error(ErrorCode::InvalidArgument, "grid.dim does not match the model");
  const double steps = c.t_final / std::abs(c.dt);
  if (std::abs(steps - std::round(steps)) > 1e-6 * steps) {
    throw Error(ErrorCode::InvalidArgument, "time.t_final must be a multiple of dt");
  }
}

double pseudoconformal_quantity(const ComplexField& field, const ModelParams& model, double t,
                                double potential) {
  (void)model;
  const auto J = galilean_apply(field, t);
  double s = 0.0;
  for (const auto& comp : J)
    for (const auto& v : comp.values()) s += std::norm(v);
  return 0.5 * s * field.grid().cell_volume() + t * t * potential;
}

double pseudoconformal_source(const ComplexField& field, const ModelParams& model) {
  const int d = field.grid().dim;
  double s = 0.0;
  for (const auto& v : field.values()) {
    const double rho = std::norm(v);
    const double F = energy_density(rho, model);
    s += 2.0 * F - d * (rho * phase_rate(rho, model) - F);
  }
  return s * field.grid().cell_volume();
}

Trajectory evolve(const EvolutionConfig& cfg) {
  validate(cfg);
  const ModelParams& model = cfg.model;
  ComplexField field = *cfg.initial;
  require_finite(field, "evolve");
  const SplitStepper stepper(cfg.grid, model, cfg.dt);
  const long long nsteps = std::llround(cfg.t_final / std::abs(cfg.dt));

  Trajectory tr;
  const Observables obs0 = observables(field, model);
  const bool bounded = model.family != Family::PureCubic2D;
  tr.h1_bound = bounded ? h1_apriori_bound(obs0, model) : std::numeric_limits<double>::infinity();
  const double kmax = cfg.grid.kmax();
  tr.blowup_threshold = cfg.blowup_threshold.value_or(std::min(1e6, 0.05 * cfg.grid.dim * kmax * kmax * obs0.mass));
  std::optional<OrbitMeter> meter;
  if (cfg.orbit_reference) meter.emplace(*cfg.orbit_reference, cfg.grid);

  const double p_scale0 = std::sqrt(obs0.mass * obs0.T());
  auto abort = [&](ErrorCode code, const std::string& msg, double t) {
    if (cfg.throw_on_abort) throw Error(code, msg);
    tr.aborted = code;
    tr.abort_time = t;
    tr.abort_message = msg;
  };

  auto record = [&](double t) -> bool {
    if (!field.all_finite()) {
      abort(ErrorCode::NonFiniteField, "field became non-finite at t = " + fmt17(t), t);
      return false;
    }
    const Observables o = observables(field, model);
    tr.times.push_back(t);
    tr.samples.push_back(o);
    tr.max_mass_drift = std::max(tr.max_mass_drift, std::abs(o.mass - obs0.mass) / obs0.mass);
    if (obs0.energy != 0.0) {
      tr.max_energy_drift = std::max(tr.max_energy_drift, std::abs(o.energy - obs0.energy) / std::abs(obs0.energy));
    }
    const double pnorm0 = std::hypot(obs0.momentum[0], obs0.momentum[1]);
    const double pden = std::max(pnorm0, p_scale0);
    if (pden > 0.0) {
      const double dp = std::hypot(o.momentum[0] - obs0.momentum[0], o.momentum[1] - obs0.momentum[1]);
      tr.max_momentum_drift = std::max(tr.max_momentum_drift, dp / pden);
    }
    if (bounded) tr.max_bound_excess = std::max(tr.max_bound_excess, o.kinetic - tr.h1_bound);
    if (meter) tr.orbit_distances.push_back(meter->measure(field).distance);
    if (cfg.monitor_pseudoconformal) {
      tr.pc_quantity.push_back(pseudoconformal_quantity(field, model, t, o.potential));
      tr.pc_source.push_back(pseudoconformal_source(field, model));
    }
    if (o.T() > tr.blowup_threshold) {
      abort(ErrorCode::BlowUpDetected,
            "gradient norm " + fmt17(o.T()) + " exceeded " + fmt17(tr.blowup_threshold) + " at t = " + fmt17(t), t);
      return false;
    }
    return true;
  };

  std::vector<double> snap_times = cfg.snapshot_times;
  std::sort(snap_times.begin(), snap_times.end());
  std::size_t next_snap = 0;
  auto take_snapshots = [&](double t) {
    while (next_snap < snap_times.size() && snap_times[next_snap] <= std::abs(t) + 0.5 * std::abs(cfg.dt)) {
      tr.snapshots.emplace_back(t, field);
      ++next_snap;
    }
  };

  bool alive = record(0.0);
  take_snapshots(0.0);
  for (long long n = 1; n <= nsteps && alive; ++n) {
    stepper.step(field);
    const double t = static_cast<double>(n) * cfg.dt;
    if (n % cfg.sample_every == 0 || n == nsteps) alive = record(t);
    take_snapshots(t);
  }
  tr.final_field = field;
  return tr;
}

double pseudoconformal_residual(const Trajectory& tr) {
  const std::size_t n = tr.times.size();
  if (n < 3 || tr.pc_quantity.size() != n || tr.pc_source.size() != n) {
    throw Error(ErrorCode::InsufficientSamples, "pseudo-conformal residual needs >= 3 monitored samples");
  }
  double scale = 1.0;
  for (double v : tr.pc_quantity) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  int used = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = tr.times[i] - tr.times[i - 1];
    const double h2 = tr.times[i + 1] - tr.times[i];
    if (std::abs(h1 - h2) > 1e-9 * std::abs(h1)) continue;
    const double lhs = (tr.pc_quantity[i + 1] - tr.pc_quantity[i - 1]) / (h1 + h2);
    const double rhs = tr.times[i] * tr.pc_source[i];
    worst = std::max(worst, std::abs(lhs - rhs));
    ++used;
  }
  if (used == 0) throw Error(ErrorCode::InsufficientSamples, "no uniformly spaced sample triples");
  return worst / scale;
}

}  // namespace lognls
