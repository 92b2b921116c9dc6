#pragma once

#include <array>
#include <optional>

#include "lognls/grid.hpp"
#include "lognls/model.hpp"

namespace lognls {

struct Observables {
  double mass = 0.0;                    // ∫|u|²
  double energy = 0.0;                  // kinetic + potential
  std::array<double, 2> momentum{};     // ∫Im(ū∇u); second entry unused in 1D
  double kinetic = 0.0;                 // ½‖∇u‖²
  double potential = 0.0;               // ∫F(|u|²)
  std::optional<double> action;         // E + ωM when ω is known
  double quartic = 0.0;                 // ∫|u|⁴
  std::optional<double> sigma_weight;   // ‖x u‖

  /// ‖∇u‖², the kinetic functional of S = ½T − V.
  double T() const noexcept { return 2.0 * kinetic; }
  /// V = ∫G(u) = −(ωM + potential); vanishes on stationary states (Pohozaev).
  double V(double omega) const noexcept { return -(omega * mass + potential); }
};

/// Spectral evaluation of mass, energy, momentum and friends.
Observables observables(const ComplexField& field, const ModelParams& model,
                        bool with_sigma_weight = false);

/// Upper bound for ½‖∇u(t)‖² implied by mass/energy conservation:
/// E + (λ√e/2)M in 2D, E + (λ e^{−1/3}/6)M for the 1D quintic model.
/// +inf for the pure cubic reference, which has no such bound.
double h1_apriori_bound(const Observables& initial, const ModelParams& model);

}  // namespace lognls
