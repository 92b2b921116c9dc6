#include "lognls/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lognls/errors.hpp"
#include "lognls/roots.hpp"

namespace lognls {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::CubicLog2D: return "cubic_log_2d";
    case Family::QuinticLog1D: return "quintic_log_1d";
    case Family::PureCubic2D: return "pure_cubic_2d";
  }
  return "unknown";
}

Family family_from_string(std::string_view name) {
  if (name == "cubic_log_2d") return Family::CubicLog2D;
  if (name == "quintic_log_1d") return Family::QuinticLog1D;
  if (name == "pure_cubic_2d") return Family::PureCubic2D;
  throw Error(ErrorCode::ConfigError, "model.family: unknown family '" + std::string(name) + "'");
}

double ModelParams::require_omega() const {
  if (!omega) throw Error(ErrorCode::MissingOmega, "operation needs a frequency omega");
  return *omega;
}

namespace constants {
double sqrt_e() { return std::exp(0.5); }
double e_quarter_inv() { return std::exp(-0.25); }
double e_third() { return std::exp(1.0 / 3.0); }
double e_sixth_inv() { return std::exp(-1.0 / 6.0); }
}  // namespace constants

Interval omega_window(const ModelParams& model) {
  if (!(model.lambda > 0.0)) {
    throw Error(ErrorCode::NonPositiveLambda, "omega_window requires lambda > 0");
  }
  switch (model.family) {
    case Family::CubicLog2D:
      return {0.0, model.lambda / (2.0 * constants::sqrt_e())};
    case Family::QuinticLog1D:
      return {0.0, model.lambda / (6.0 * constants::e_third())};
    case Family::PureCubic2D:
      return {0.0, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

void require_omega_in_window(const ModelParams& model) {
  const double w = model.require_omega();
  const Interval win = omega_window(model);
  if (!win.contains(w)) {
    throw Error(ErrorCode::OmegaOutOfWindow,
                "omega = " + std::to_string(w) + " outside (" + std::to_string(win.lo) + ", " +
                    std::to_string(win.hi) + ")");
  }
}

AmplitudeRoots amplitude_roots(const ModelParams& model) {
  if (model.family != Family::CubicLog2D) {
    throw Error(ErrorCode::InvalidArgument, "amplitude_roots is defined for cubic_log_2d");
  }
  require_omega_in_window(model);
  const double c = *model.omega / model.lambda;
  auto f = [c](double y) { return y > 0.0 ? y * std::log(y) + c : c; };
  auto df = [](double y) { return std::log(y) + 1.0; };
  const double knee = std::exp(-1.0);

  double lower = bisect(f, 0.0, knee);
  lower = newton_polish(f, df, lower, 0.0, knee);
  double upper = bisect(f, knee, 1.0);
  upper = newton_polish(f, df, upper, knee, 1.0);
  return {std::sqrt(lower), std::sqrt(upper)};
}

double nonlinear_term(double z, const ModelParams& model) {
  if (z < 0.0 || std::isnan(z)) {
    throw Error(ErrorCode::NegativeAmplitude, "nonlinear_term needs z >= 0");
  }
  const double lam = model.lambda;
  switch (model.family) {
    case Family::CubicLog2D:
      if (z < kAmplitudeClamp) return 0.0;
      return lam * z * z * z * std::log(z * z);
    case Family::QuinticLog1D: {
      if (z < kAmplitudeClamp) return 0.0;
      const double z2 = z * z;
      return lam * z2 * z2 * z * std::log(z2);
    }
    case Family::PureCubic2D:
      return -lam * z * z * z;
  }
  return 0.0;
}

double phase_rate(double density, const ModelParams& model) {
  const double lam = model.lambda;
  switch (model.family) {
    case Family::CubicLog2D:
      if (density < kAmplitudeClamp * kAmplitudeClamp) return 0.0;
      return lam * density * std::log(density);
    case Family::QuinticLog1D:
      if (density < kAmplitudeClamp * kAmplitudeClamp) return 0.0;
      return lam * density * density * std::log(density);
    case Family::PureCubic2D:
      return -lam * density;
  }
  return 0.0;
}

double stationary_g(double z, const ModelParams& model) {
  const double w = model.require_omega();
  return -2.0 * w * z - 2.0 * nonlinear_term(z, model);
}

double potential_G(double z, const ModelParams& model) {
  if (z < 0.0) throw Error(ErrorCode::NegativeAmplitude, "potential_G needs z >= 0");
  const double w = model.require_omega();
  const double lam = model.lambda;
  const double z2 = z * z;
  if (model.family == Family::PureCubic2D) return -w * z2 + 0.5 * lam * z2 * z2;
  if (z < kAmplitudeClamp) return -w * z2;
  switch (model.family) {
    case Family::CubicLog2D:
      return -w * z2 - 0.5 * lam * z2 * z2 * (std::log(z2) - 0.5);
    case Family::QuinticLog1D:
      return -w * z2 - lam / 3.0 * z2 * z2 * z2 * (std::log(z2) - 1.0 / 3.0);
    default:
      break;
  }
  return 0.0;
}

double energy_density(double density, const ModelParams& model) {
  const double lam = model.lambda;
  if (model.family == Family::PureCubic2D) return -0.5 * lam * density * density;
  if (density < kAmplitudeClamp * kAmplitudeClamp) return 0.0;
  switch (model.family) {
    case Family::CubicLog2D:
      return 0.5 * lam * density * density * (std::log(density) - 0.5);
    case Family::QuinticLog1D:
      return lam / 3.0 * density * density * density * (std::log(density) - 1.0 / 3.0);
    default:
      break;
  }
  return 0.0;
}

double gtilde(double z, const ModelParams& model) {
  const double c = model.require_omega() / model.lambda;
  if (z < kAmplitudeClamp) return -c;
  const double z2 = z * z;
  return 0.25 * z2 - z2 * std::log(z) - c;
}

double potential_zero(const ModelParams& model) {
  require_omega_in_window(model);
  const double w = *model.omega;
  const double lam = model.lambda;
  switch (model.family) {
    case Family::CubicLog2D: {
      auto f = [&](double z) { return gtilde(z, model); };
      auto df = [](double z) { return -0.5 * z - 2.0 * z * std::log(z); };
      const double top = constants::e_quarter_inv();
      double u1 = bisect(f, 0.0, top);
      return newton_polish(f, df, u1, 0.0, top);
    }
    case Family::QuinticLog1D: {
      const double c = 3.0 * w / lam;
      auto h = [c](double s) { return s > 0.0 ? s * s * (std::log(s) - 1.0 / 3.0) + c : c; };
      auto dh = [](double s) { return 2.0 * s * (std::log(s) - 1.0 / 3.0) + s; };
      const double top = constants::e_sixth_inv();
      double a = bisect(h, 0.0, top);
      a = newton_polish(h, dh, a, 0.0, top);
      return std::sqrt(a);
    }
    case Family::PureCubic2D:
      return std::sqrt(2.0 * w / lam);
  }
  return 0.0;
}

}  // namespace lognls
