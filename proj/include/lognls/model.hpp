#pragma once

#include <optional>
#include <string_view>

namespace lognls {

/// Nonlinearity families sharing the evolution and stationary machinery.
///
/// CubicLog2D    i u_t + ½Δu = λ u|u|² ln|u|²   (x ∈ ℝ²)
/// QuinticLog1D  i u_t + ½u_xx = λ u|u|⁴ ln|u|²  (x ∈ ℝ)
/// PureCubic2D   i u_t + ½Δu = −λ u|u|²          (focusing reference, x ∈ ℝ²)
enum class Family { CubicLog2D, QuinticLog1D, PureCubic2D };

std::string_view to_string(Family family);
Family family_from_string(std::string_view name);

struct ModelParams {
  Family family = Family::CubicLog2D;
  double lambda = 1.0;
  std::optional<double> omega;

  int dim() const noexcept { return family == Family::QuinticLog1D ? 1 : 2; }

  /// The frequency, or MissingOmega.
  double require_omega() const;

  ModelParams with_omega(double w) const {
    ModelParams m = *this;
    m.omega = w;
    return m;
  }
};

/// Open interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return x > lo && x < hi; }
};

namespace constants {
double sqrt_e();              // e^{1/2}
double e_quarter_inv();       // e^{-1/4}, argmax of z²/4 − z² ln z
double e_third();             // e^{1/3}
double e_sixth_inv();         // e^{-1/6}, 1D double-root amplitude²
}  // namespace constants

/// |u| below this is treated as exactly zero in every log-weighted term.
inline constexpr double kAmplitudeClamp = 1e-150;

/// Frequencies for which a positive localized stationary state exists.
/// PureCubic2D has no upper edge and returns (0, +inf).
Interval omega_window(const ModelParams& model);

/// Throws OmegaOutOfWindow unless model.omega lies strictly inside the window.
void require_omega_in_window(const ModelParams& model);

struct AmplitudeRoots {
  double alpha;         // √y₋, y₋ ∈ (0, 1/e)
  double sqrt_z_omega;  // √z_ω, z_ω ∈ (1/e, 1)
};

/// Both roots of y ln y = −ω/λ (CubicLog2D).
AmplitudeRoots amplitude_roots(const ModelParams& model);

/// Right-hand side N(z) of the evolution equation for real amplitude z ≥ 0,
/// i.e. the nonlinearity is u·N(|u|)/|u|.
double nonlinear_term(double z, const ModelParams& model);

/// N(z)/z as a function of the density ρ = z²; the phase rate of the
/// modulus-preserving nonlinear sub-flow.
double phase_rate(double density, const ModelParams& model);

/// g(z) = −2ωz − 2N(z): the stationary equation reads −Δφ = g(φ).
double stationary_g(double z, const ModelParams& model);

/// G(z) = ∫₀ᶻ g, closed form.
double potential_G(double z, const ModelParams& model);

/// Nonlinear energy density F(ρ) with F′(ρ) = N(√ρ)/√ρ, so that
/// E(u) = ½‖∇u‖² + ∫F(|u|²).
double energy_density(double density, const ModelParams& model);

/// g̃(z) = z²/4 − z² ln z − ω/λ, with G(z) = λ z² g̃(z) (CubicLog2D).
double gtilde(double z, const ModelParams& model);

/// Positive zero of G below the hilltop: the smallest amplitude with
/// enough potential energy to reach zero at infinity.
double potential_zero(const ModelParams& model);

}  // namespace lognls
