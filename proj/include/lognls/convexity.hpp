#pragma once

#include <optional>
#include <vector>

namespace lognls {

/// Largest-amplitude turning point of the 1D quintic-log mechanics, in the
/// density variable s = φ²: W(s) = ωs + (λ/3)s³ ln(s/e^{1/3}).
struct TurningPoint {
  double a = 0.0;
  double W_prime_at_a = 0.0;  // ω + λa² ln a, negative
  double omega = 0.0;
  double lambda = 0.0;
};

/// Smallest positive root of s²(ln s − 1/3) = −3ω/λ.
TurningPoint find_turning_point(double lambda, double omega);

/// W(s) for the turning point's parameters.
double turning_W(const TurningPoint& tp, double s);

struct DppValue {
  double value = 0.0;       // canonical: general form scaled to the ½∂ₓ² normalization
  double general = 0.0;     // general-form integral as printed
  double simplified = 0.0;  // simplified-form integral as printed
  double error_estimate = 0.0;
};

/// Second derivative of the action along the 1D ground-state branch.
DppValue dpp_quadrature(double lambda, double omega);

/// Integrands of both d″ forms at s = a − d, for endpoint checks.
double dpp_general_integrand(const TurningPoint& tp, double d);
double dpp_simplified_integrand(const TurningPoint& tp, double d);

struct Profile1D {
  std::vector<double> x_nodes;  // symmetric, increasing
  std::vector<double> values;
  double phi_max = 0.0;
  double omega = 0.0;
  double lambda = 0.0;
  // Computed in the amplitude variable, independent of the x nodes.
  double mass = 0.0;
  double energy = 0.0;
  double action = 0.0;
};

/// Even ground state from the first integral φ′² = 2W(φ²), inverted on a
/// uniform grid of n_nodes points over [0, 40/√(2ω)] and mirrored.
Profile1D ground_state_1d_quadrature(double lambda, double omega, int n_nodes = 4001);

struct ConvexityRow {
  double omega = 0.0;
  double dpp_quad = 0.0;
  double dpp_general = 0.0;
  double dpp_simplified = 0.0;
  std::optional<double> dpp_fd;       // centred second difference, δω = 1e−4
  std::optional<double> dpp_fd_half;  // same at δω = 5e−5
  double mass = 0.0;
  double action = 0.0;
};

struct ConvexityScan {
  std::vector<ConvexityRow> rows;
  bool all_positive = false;
  bool mass_increasing = false;
  bool signs_agree = false;
  double max_fd_rel_error = 0.0;
};

/// Finite differences need a δω stencil inside the window; rows where it
/// does not fit leave dpp_fd empty.
ConvexityScan action_convexity_scan(double lambda, const std::vector<double>& omegas);

}  // namespace lognls
