#include "lognls/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "lognls/errors.hpp"
#include "lognls/ode.hpp"
#include "lognls/roots.hpp"

namespace lognls {

std::string_view to_string(ShotOutcome outcome) {
  switch (outcome) {
    case ShotOutcome::Overshoot: return "overshoot";
    case ShotOutcome::Undershoot: return "undershoot";
    case ShotOutcome::Converged: return "converged";
  }
  return "unknown";
}

namespace {

constexpr double kConvergedFloor = 1e-12;

ModelParams with_default_omega(const ModelParams& model) {
  if (model.family == Family::PureCubic2D && !model.omega) return model.with_omega(1.0);
  return model;
}

// Largest amplitude with g = 0 (top of the mechanical potential G).
double hilltop(const ModelParams& model) {
  switch (model.family) {
    case Family::CubicLog2D:
      return amplitude_roots(model).sqrt_z_omega;
    case Family::QuinticLog1D: {
      const double c = *model.omega / model.lambda;
      auto f = [c](double y) { return y * y * std::log(y) + c; };
      auto df = [](double y) { return y * (2.0 * std::log(y) + 1.0); };
      const double knee = std::exp(-0.5);
      double y = bisect(f, knee, 1.0);
      y = newton_polish(f, df, y, knee, 1.0);
      return std::sqrt(y);
    }
    case Family::PureCubic2D:
      break;
  }
  return std::numeric_limits<double>::infinity();
}

// Right-hand side of the radial equation, with the log families written
// relative to the hilltop s so that g(s) is exactly zero.
class RadialRhs {
 public:
  explicit RadialRhs(const ModelParams& model)
      : model_(model), d_(model.dim()), omega_(*model.omega), lam_(model.lambda) {
    if (model.family != Family::PureCubic2D) {
      s_ = hilltop(model);
      p_ = model.family == Family::CubicLog2D ? 2 : 4;
      sp_ = std::pow(s_, p_);
      omega_eff_ = -lam_ * sp_ * std::log(s_ * s_);
    }
  }

  double g(double phi) const {
    if (model_.family == Family::PureCubic2D) return -2.0 * omega_ * phi + 2.0 * lam_ * phi * phi * phi;
    const double a = std::abs(phi);
    if (a < kAmplitudeClamp) return -2.0 * omega_eff_ * phi;
    const double a2 = a * a;
    const double ap = p_ == 2 ? a2 : a2 * a2;
    double h;
    if (a < 0.5 * s_) {
      h = omega_eff_ + lam_ * ap * std::log(a2);
    } else {
      const double diff = a - s_;
      const double dp = p_ == 2 ? diff * (a + s_) : diff * (a + s_) * (a2 + s_ * s_);
      h = lam_ * (dp * std::log(a2) + 2.0 * sp_ * std::log1p(diff / s_));
    }
    return -2.0 * phi * h;
  }

  double dg(double phi) const {
    const double a = std::abs(phi);
    switch (model_.family) {
      case Family::PureCubic2D:
        return -2.0 * omega_ + 6.0 * lam_ * phi * phi;
      case Family::CubicLog2D:
        if (a < kAmplitudeClamp) return -2.0 * omega_eff_;
        return -2.0 * omega_eff_ - 2.0 * lam_ * a * a * (3.0 * std::log(a * a) + 2.0);
      case Family::QuinticLog1D:
        if (a < kAmplitudeClamp) return -2.0 * omega_eff_;
        return -2.0 * omega_eff_ - 2.0 * lam_ * std::pow(a, 4) * (5.0 * std::log(a * a) + 2.0);
    }
    return 0.0;
  }

  std::array<double, 2> operator()(double r, const std::array<double, 2>& y) const {
    return {y[1], -g(y[0]) - (d_ - 1) * y[1] / r};
  }

  int dim() const { return d_; }

 private:
  ModelParams model_;
  int d_;
  double omega_;
  double lam_;
  double s_ = 0.0;
  int p_ = 2;
  double sp_ = 0.0;
  double omega_eff_ = 0.0;
};

double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * h * (f[0] + f[1]);
  if (n == 3) return h / 3.0 * (f[0] + 4.0 * f[1] + f[2]);
  // Even number of intervals via Simpson 1/3; odd count closes with 3/8.
  std::size_t m = n - 1;
  double tail = 0.0;
  if (m % 2 == 1) {
    tail = 3.0 * h / 8.0 * (f[n - 4] + 3.0 * f[n - 3] + 3.0 * f[n - 2] + f[n - 1]);
    m -= 3;
  }
  double s = f[0] + f[m];
  for (std::size_t j = 1; j < m; ++j) s += (j % 2 == 1 ? 4.0 : 2.0) * f[j];
  return h / 3.0 * s + tail;
}

}  // namespace

ShotResult shoot(const ModelParams& model_in, double b, double r_max, double output_step) {
  if (!(b > 0.0) || !std::isfinite(b)) throw Error(ErrorCode::NonPositiveB, "shoot needs b > 0");
  const ModelParams model = with_default_omega(model_in);
  model.require_omega();
  if (!(r_max > 0.0)) throw Error(ErrorCode::InvalidArgument, "shoot needs r_max > 0");

  const RadialRhs rhs(model);
  const int d = rhs.dim();

  // Series start φ = b + a r² + c r⁴.
  const double a2 = -rhs.g(b) / (2.0 * d);
  const double a4 = -rhs.dg(b) * a2 / (4.0 * (d + 2));
  const double scale = std::sqrt(std::abs(rhs.dg(b))) + std::sqrt(2.0 * *model.omega);
  const double r0 = std::min(1e-3 / scale, 1e-3 * r_max);
  auto series = [&](double r) -> std::array<double, 2> {
    const double r2 = r * r;
    return {b + a2 * r2 + a4 * r2 * r2, 2.0 * a2 * r + 4.0 * a4 * r2 * r};
  };

  ShotResult res;
  const bool record = output_step > 0.0;
  std::size_t next = 0;
  auto emit = [&](double r, const std::array<double, 2>& y) {
    res.r.push_back(r);
    res.phi.push_back(y[0]);
    res.dphi.push_back(y[1]);
    ++next;
  };
  if (record) {
    emit(0.0, {b, 0.0});
    while (next * output_step <= r0) emit(next * output_step, series(next * output_step));
  }

  auto mech = [&](const std::array<double, 2>& y) {
    return 0.5 * y[1] * y[1] + potential_G(std::abs(y[0]), model);
  };

  bool decided = false;
  std::array<double, 2> last_y = series(r0);
  const DormandPrince<2> ode({1e-12, 1e-14 * std::min(1.0, b)});
  auto on_step = [&](const DormandPrince<2>::Step& st) {
    const auto& y = st.y1;
    last_y = y;
    double stop_at = st.t1;
    if (y[0] <= 0.0) {
      double lo = st.t0, hi = st.t1;
      for (int it = 0; it < 80 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (st.at(mid)[0] > 0.0 ? lo : hi) = mid;
      }
      res.outcome = ShotOutcome::Overshoot;
      stop_at = lo;
      decided = true;
    } else if (y[1] > 0.0 || (d == 2 && mech(y) < 0.0)) {
      res.outcome = ShotOutcome::Undershoot;
      decided = true;
    } else if (y[0] < kConvergedFloor && std::abs(y[1]) < kConvergedFloor) {
      res.outcome = ShotOutcome::Converged;
      decided = true;
    }
    if (record) {
      while (next * output_step <= stop_at) {
        const double r = next * output_step;
        emit(r, st.at(r));
      }
    }
    res.r_event = stop_at;
    return !decided;
  };
  ode.integrate(rhs, r0, series(r0), r_max, r0, on_step);
  if (!decided) {
    // Still positive and decreasing at r_max: leftover mechanical energy
    // means the amplitude was too large.
    res.outcome = mech(last_y) > 0.0 ? ShotOutcome::Overshoot : ShotOutcome::Undershoot;
    res.r_event = r_max;
  }
  return res;
}

double RadialProfile::value_at(double r) const {
  r = std::abs(r);
  if (r_nodes.empty()) return 0.0;
  const double h = step();
  const std::size_t n = r_nodes.size();
  if (r >= r_nodes.back()) {
    if (tail_coeff == 0.0) return 0.0;
    if (r == r_nodes.back()) return values.back();
    const double pre = dim() == 2 ? 1.0 / std::sqrt(r) : 1.0;
    return tail_coeff * pre * std::exp(-tail_rate * r);
  }
  const std::size_t j = std::min(static_cast<std::size_t>(r / h), n - 2);
  const double t = (r - r_nodes[j]) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * values[j] + (t3 - 2 * t2 + t) * h * derivs[j] +
         (-2 * t3 + 3 * t2) * values[j + 1] + (t3 - t2) * h * derivs[j + 1];
}

double RadialProfile::deriv_at(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r_nodes.empty()) return 0.0;
  const double h = step();
  const std::size_t n = r_nodes.size();
  if (r >= r_nodes.back()) {
    const double v = value_at(r);
    return -sign * v * (tail_rate + (dim() == 2 ? 0.5 / r : 0.0));
  }
  const std::size_t j = std::min(static_cast<std::size_t>(r / h), n - 2);
  const double t = (r - r_nodes[j]) / h;
  const double t2 = t * t;
  const double dv = ((6 * t2 - 6 * t) * values[j] + (-6 * t2 + 6 * t) * values[j + 1]) / h +
                    (3 * t2 - 4 * t + 1) * derivs[j] + (3 * t2 - 2 * t) * derivs[j + 1];
  return sign * dv;
}

RadialProfile find_ground_state(const ModelParams& model_in, double tol) {
  if (!(tol >= 1e-13)) throw Error(ErrorCode::InvalidArgument, "find_ground_state needs tol >= 1e-13");
  if (!(model_in.lambda > 0.0)) {
    throw Error(ErrorCode::NonPositiveLambda, "ground states need lambda > 0");
  }
  const ModelParams model = with_default_omega(model_in);
  require_omega_in_window(model);
  const double w = *model.omega;
  const double kappa = std::sqrt(2.0 * w);
  const double r_max = 40.0 / kappa;

  RadialProfile prof;
  prof.model = model;

  auto classify = [&](double b) { return shoot(model, b, r_max).outcome; };

  double lo = potential_zero(model);
  if (model.family == Family::QuinticLog1D) lo *= 0.5;
  double hi = model.family == Family::PureCubic2D ? 4.0 * lo : hilltop(model);

  ShotOutcome c_lo = classify(lo);
  for (int k = 0; k < 60 && c_lo == ShotOutcome::Overshoot; ++k) {
    lo *= 0.5;
    c_lo = classify(lo);
    prof.warnings.push_back("lower bracket expanded to b = " + std::to_string(lo));
  }
  ShotOutcome c_hi = classify(hi);
  if (c_hi != ShotOutcome::Overshoot) {
    if (model.family == Family::PureCubic2D) {
      for (int k = 0; k < 60 && c_hi != ShotOutcome::Overshoot; ++k) {
        hi *= 2.0;
        c_hi = classify(hi);
      }
    } else {
      const double top = hi;
      for (int k = 40; k >= 1 && c_hi != ShotOutcome::Overshoot; --k) {
        hi = lo + (top - lo) * (1.0 - std::ldexp(1.0, -k));
        c_hi = classify(hi);
      }
    }
    prof.warnings.push_back("upper bracket moved to b = " + std::to_string(hi));
  }
  if (c_lo == ShotOutcome::Overshoot || c_hi == ShotOutcome::Undershoot) {
    throw Error(ErrorCode::BracketFailure, "no undershoot/overshoot bracket for the shooting amplitude");
  }

  std::optional<double> converged;
  if (c_lo == ShotOutcome::Converged) converged = lo;
  if (c_hi == ShotOutcome::Converged) converged = hi;
  for (int it = 0; it < 400 && !converged; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    switch (classify(mid)) {
      case ShotOutcome::Undershoot: lo = mid; break;
      case ShotOutcome::Overshoot: hi = mid; break;
      case ShotOutcome::Converged: converged = mid; break;
    }
  }

  const double h = kappa > 0.0 ? std::clamp(0.5 * std::pow(tol, 0.25), 0.002, 0.02) / kappa : 0.01;
  const ShotResult under = shoot(model, converged.value_or(lo), r_max, h);
  const ShotResult over = converged ? under : shoot(model, hi, r_max, h);

  // Keep the stretch where both bracketing trajectories agree.
  const std::size_t avail = std::min(under.phi.size(), over.phi.size());
  std::size_t cut = avail;
  for (std::size_t j = 1; j < avail; ++j) {
    const double p = under.phi[j];
    if (p <= 1e-10 || under.dphi[j] > 0.0 || std::abs(over.phi[j] - p) > 1e-6 * p) {
      cut = j;
      break;
    }
  }
  if (cut < 16) throw Error(ErrorCode::IntegratorFailure, "shooting trajectory too short to stitch a tail");
  prof.r_nodes.assign(under.r.begin(), under.r.begin() + cut);
  prof.values.assign(under.phi.begin(), under.phi.begin() + cut);
  prof.derivs.assign(under.dphi.begin(), under.dphi.begin() + cut);
  prof.derivs[0] = 0.0;
  prof.center_value = prof.values[0];

  // Log-linear fit of r^{(d−1)/2}φ over the last decade.
  const int d = model.dim();
  const double last = prof.values.back();
  std::size_t j0 = cut - 1;
  while (j0 > 1 && prof.values[j0 - 1] <= 10.0 * last) --j0;
  if (cut - j0 < 3) j0 = cut > 16 ? cut - 16 : 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double npts = static_cast<double>(cut - j0);
  for (std::size_t j = j0; j < cut; ++j) {
    const double r = prof.r_nodes[j];
    const double y = std::log(prof.values[j]) + 0.5 * (d - 1) * std::log(r);
    sx += r;
    sy += y;
    sxx += r * r;
    sxy += r * y;
  }
  const double slope = (npts * sxy - sx * sy) / (npts * sxx - sx * sx);
  prof.tail_rate = -slope;
  if (!(prof.tail_rate > 0.0)) throw Error(ErrorCode::QuadratureFailure, "tail fit produced a non-decaying rate");
  const double r_last = prof.r_nodes.back();
  prof.tail_coeff = last * std::pow(r_last, 0.5 * (d - 1)) * std::exp(prof.tail_rate * r_last);

  if (std::abs(prof.tail_rate / kappa - 1.0) > 0.05) {
    prof.warnings.push_back("tail rate deviates from sqrt(2 omega) by more than 5%");
  }
  const auto res = pohozaev_residuals(prof);
  const double worst = std::max({std::abs(res.r1), std::abs(res.r2), std::abs(res.rV)});
  if (worst > 10.0 * tol) {
    prof.warnings.push_back("Pohozaev residual " + std::to_string(worst) + " above 10*tol");
  }
  return prof;
}

RadialIntegrals radial_integrals(const RadialProfile& profile) {
  RadialIntegrals out;
  if (profile.r_nodes.size() < 2) return out;
  const ModelParams& model = profile.model;
  const int d = profile.dim();
  const double h = profile.step();
  std::size_t n = profile.r_nodes.size();
  if (profile.tail_coeff > 0.0 && profile.tail_rate > 0.0) {
    n += static_cast<std::size_t>(std::ceil(40.0 / profile.tail_rate / h));
  }
  std::vector<double> fm(n), fg(n), fq(n), fn(n), fp(n);
  for (std::size_t j = 0; j < n; ++j) {
    double r, p, dp;
    if (j < profile.r_nodes.size()) {
      r = profile.r_nodes[j];
      p = profile.values[j];
      dp = profile.derivs[j];
    } else {
      r = j * h;
      p = profile.value_at(r);
      dp = profile.deriv_at(r);
    }
    const double wgt = d == 2 ? 2.0 * std::numbers::pi * r : 2.0;
    const double a = std::abs(p);
    const double rho = a * a;
    fm[j] = wgt * rho;
    fg[j] = wgt * dp * dp;
    fq[j] = wgt * rho * rho;
    fn[j] = wgt * a * nonlinear_term(a, model);
    fp[j] = wgt * energy_density(rho, model);
  }
  out.mass = simpson(fm, h);
  out.grad_sq = simpson(fg, h);
  out.quartic = simpson(fq, h);
  out.phi_n = simpson(fn, h);
  out.potential = simpson(fp, h);
  return out;
}

PohozaevResiduals pohozaev_residuals(const RadialProfile& profile) {
  const auto I = radial_integrals(profile);
  const double w = profile.model.omega.value_or(profile.model.family == Family::PureCubic2D ? 1.0 : 0.0);
  const int d = profile.dim();
  const double kin = 0.5 * I.grad_sq;
  const double wm = w * I.mass;

  auto normalized = [](double value, std::initializer_list<double> terms) {
    double big = 0.0;
    for (double t : terms) big = std::max(big, std::abs(t));
    return big == 0.0 ? 0.0 : value / big;
  };

  PohozaevResiduals res;
  res.r1 = normalized(kin + I.phi_n + wm, {kin, I.phi_n, wm});
  // V = −ωM − ∫F; in d dimensions d·V = (d−2)/2·‖∇φ‖².
  const double V = -wm - I.potential;
  if (d == 2) {
    res.rV = normalized(V, {wm, I.potential});
    res.r2 = normalized(kin + (I.phi_n - 2.0 * I.potential) - wm, {kin, I.phi_n - 2.0 * I.potential, wm});
  } else {
    res.rV = normalized(V + kin, {wm, I.potential, kin});
    res.r2 = normalized(kin + I.phi_n + wm + 2.0 * (V + kin), {kin, I.phi_n, wm, I.potential});
  }
  return res;
}

double radial_action(const RadialProfile& profile) {
  const auto I = radial_integrals(profile);
  return 0.5 * I.grad_sq + I.potential + profile.model.require_omega() * I.mass;
}

double uniqueness_sign_expression(double z, const ModelParams& model) {
  const double w = model.require_omega();
  const double lam = model.lambda;
  if (z < kAmplitudeClamp) return 0.0;
  return 16.0 * lam * z * z * z * (2.0 * w * (1.0 + std::log(z)) - lam * z * z);
}

UniquenessCertificate uniqueness_certificate(const ModelParams& model, int samples) {
  if (model.family != Family::CubicLog2D) {
    throw Error(ErrorCode::InvalidArgument, "uniqueness_certificate is defined for cubic_log_2d");
  }
  if (samples < 3) throw Error(ErrorCode::InvalidArgument, "uniqueness_certificate needs >= 3 samples");
  require_omega_in_window(model);
  UniquenessCertificate cert;
  cert.samples = samples;
  const auto roots = amplitude_roots(model);
  cert.alpha = roots.alpha;
  cert.sqrt_z_omega = roots.sqrt_z_omega;
  cert.u1 = potential_zero(model);

  const double top = constants::e_quarter_inv();
  bool mono = true;
  // Increasing on (0, e^{−1/4}), decreasing on (e^{−1/4}, 1].
  double prev = gtilde(0.0, model);
  for (int i = 1; i < samples; ++i) {
    const double z = top * i / samples;
    const double v = gtilde(z, model);
    if (!(v > prev)) mono = false;
    prev = v;
  }
  prev = gtilde(top, model);
  for (int i = 1; i <= samples; ++i) {
    const double z = top + (1.0 - top) * i / samples;
    const double v = gtilde(z, model);
    if (!(v < prev)) mono = false;
    prev = v;
  }
  cert.gtilde_monotone_ok = mono;

  bool g_pos = true, s_neg = true;
  const double a = cert.u1, b = cert.sqrt_z_omega;
  for (int i = 1; i < samples; ++i) {
    const double z = a + (b - a) * i / samples;
    if (!(potential_G(z, model) > 0.0)) g_pos = false;
    if (!(uniqueness_sign_expression(z, model) < 0.0)) s_neg = false;
  }
  cert.G_positive_on_interval_ok = g_pos;
  cert.s_prime_negative_ok = s_neg;
  return cert;
}

MassAsymptotics mass_asymptotics_sweep(double lambda, const std::vector<double>& omegas, double tol) {
  ModelParams base{Family::CubicLog2D, lambda, std::nullopt};
  for (double w : omegas) require_omega_in_window(base.with_omega(w));

  MassAsymptotics out;
  const auto q = find_ground_state(ModelParams{Family::PureCubic2D, lambda, 1.0}, tol);
  out.mass_q = radial_integrals(q).mass;
  for (double w : omegas) {
    const auto prof = find_ground_state(base.with_omega(w), tol);
    MassAsymptoticsRow row;
    row.omega = w;
    row.mass = radial_integrals(prof).mass;
    const double ln_inv = std::log(1.0 / w);
    row.ratio = row.mass * std::sqrt(ln_inv) / out.mass_q;
    row.ratio_log = row.mass * ln_inv / out.mass_q;
    out.rows.push_back(row);
  }
  return out;
}

ComplexField embed_radial(const RadialProfile& profile, const Grid& grid, std::array<double, 2> center,
                          double phase) {
  if (grid.dim != profile.dim()) {
    throw Error(ErrorCode::InvalidArgument, "embed_radial: profile and grid dimensions differ");
  }
  if (profile.value_at(grid.half_width) > 1e-3 * profile.center_value) {
    throw Error(ErrorCode::GridTooSmall, "embed_radial: profile not localized inside the box");
  }
  const double period = 2.0 * grid.half_width;
  auto wrap = [&](double v) { return v - period * std::round(v / period); };
  ComplexField out(grid);
  const Complex rot = std::polar(1.0, phase);
  double x[2] = {0.0, 0.0};
  for (std::size_t idx = 0; idx < out.size(); ++idx) {
    coordinates_of(grid, idx, x);
    const double dx = wrap(x[0] - center[0]);
    const double dy = grid.dim == 2 ? wrap(x[1] - center[1]) : 0.0;
    out[idx] = rot * profile.value_at(std::sqrt(dx * dx + dy * dy));
  }
  return out;
}

}  // namespace lognls
