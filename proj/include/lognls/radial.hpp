#pragma once

#include <array>
#include <string>
#include <vector>

#include "lognls/grid.hpp"
#include "lognls/model.hpp"

namespace lognls {

enum class ShotOutcome { Overshoot, Undershoot, Converged };

std::string_view to_string(ShotOutcome outcome);

struct ShotResult {
  ShotOutcome outcome = ShotOutcome::Undershoot;
  double r_event = 0.0;  // radius at which the outcome was decided
  // Uniformly spaced samples r_j = j·output_step up to r_event (empty when
  // no output step was requested).
  std::vector<double> r;
  std::vector<double> phi;
  std::vector<double> dphi;
};

/// Integrates −Δφ = g(φ) radially from φ(0) = b, φ′(0) = 0 and classifies
/// the trajectory. PureCubic2D uses ω = 1 when the model carries none.
ShotResult shoot(const ModelParams& model, double b, double r_max, double output_step = 0.0);

/// Positive radial ground state on uniform nodes, with the tail model
/// φ(r) ≈ C·r^{−(d−1)/2}·e^{−δr} beyond the last node.
struct RadialProfile {
  ModelParams model;
  std::vector<double> r_nodes;
  std::vector<double> values;
  std::vector<double> derivs;
  double tail_rate = 0.0;   // δ
  double tail_coeff = 0.0;  // C
  double center_value = 0.0;
  std::vector<std::string> warnings;

  int dim() const noexcept { return model.dim(); }
  double step() const noexcept { return r_nodes.size() > 1 ? r_nodes[1] - r_nodes[0] : 0.0; }
  double last_node() const noexcept { return r_nodes.empty() ? 0.0 : r_nodes.back(); }

  /// Cubic Hermite interpolation on the nodes, tail model beyond.
  double value_at(double r) const;
  double deriv_at(double r) const;
};

/// Bisects the shooting amplitude down to adjacent doubles. `tol` sets the
/// output resolution (node spacing ∝ tol^{1/4}/√(2ω)).
RadialProfile find_ground_state(const ModelParams& model, double tol = 1e-10);

/// Radial quadratures over the whole space (full line in 1D).
struct RadialIntegrals {
  double mass = 0.0;       // ∫φ²
  double grad_sq = 0.0;    // ∫|∇φ|²
  double quartic = 0.0;    // ∫φ⁴
  double phi_n = 0.0;      // ∫φ·N(φ)
  double potential = 0.0;  // ∫F(φ²)
};

RadialIntegrals radial_integrals(const RadialProfile& profile);

struct PohozaevResiduals {
  double r1 = 0.0;  // ½∫|∇φ|² + ∫φN(φ) + ω∫φ²
  double r2 = 0.0;  // r1 + 2·(Pohozaev form)
  double rV = 0.0;  // V(φ) = ∫G(φ) (2D); V + ½∫|∇φ|² in 1D
};

/// Each residual is divided by the largest of its constituent terms.
PohozaevResiduals pohozaev_residuals(const RadialProfile& profile);

/// S(φ) = E(φ) + ωM(φ) from the radial quadratures.
double radial_action(const RadialProfile& profile);

struct UniquenessCertificate {
  double u1 = 0.0;
  double alpha = 0.0;
  double sqrt_z_omega = 0.0;
  bool gtilde_monotone_ok = false;
  bool G_positive_on_interval_ok = false;
  bool s_prime_negative_ok = false;
  int samples = 0;

  bool all_ok() const noexcept {
    return gtilde_monotone_ok && G_positive_on_interval_ok && s_prime_negative_ok;
  }
};

/// Sampled sign and monotonicity checks behind uniqueness (CubicLog2D).
UniquenessCertificate uniqueness_certificate(const ModelParams& model, int samples = 10000);

/// 16λz³(2ω(1+ln z) − λz²), which equals g(z)²·s′(z) for s = z·g′(z)/g(z).
double uniqueness_sign_expression(double z, const ModelParams& model);

struct MassAsymptoticsRow {
  double omega = 0.0;
  double mass = 0.0;
  double ratio = 0.0;      // M·√(ln(1/ω)) / M(Q)
  double ratio_log = 0.0;  // M·ln(1/ω) / M(Q)
};

struct MassAsymptotics {
  double mass_q = 0.0;  // M(Q) for −½ΔQ − λQ³ + Q = 0
  std::vector<MassAsymptoticsRow> rows;
};

MassAsymptotics mass_asymptotics_sweep(double lambda, const std::vector<double>& omegas,
                                       double tol = 1e-10);

/// Samples φ(|x − center|)·e^{iθ} on the grid (minimum-image distance).
ComplexField embed_radial(const RadialProfile& profile, const Grid& grid,
                          std::array<double, 2> center = {0.0, 0.0}, double phase = 0.0);

}  // namespace lognls
