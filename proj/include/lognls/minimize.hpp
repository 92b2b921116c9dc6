#pragma once

#include <optional>

#include "lognls/grid.hpp"
#include "lognls/model.hpp"

namespace lognls {

/// E′(u) = −½Δu + N(|u|)u/|u|, zero where u vanishes.
ComplexField gradient_E(const ComplexField& field, const ModelParams& model);

/// ½‖∇u‖² + ∫F(|u|²) without the other observables.
double energy_functional(const ComplexField& field, const ModelParams& model);

struct MinimizerOptions {
  double tol = 1e-8;
  int max_iterations = 50000;
  // Sobolev preconditioner (1 + |k|²)^{-1}; unset means on for N ≥ 512.
  std::optional<bool> preconditioned;
  double initial_width = 2.0;
  std::optional<ComplexField> warm_start;
};

struct MinimizerResult {
  ComplexField field;
  double energy = 0.0;
  double lagrange_omega = 0.0;
  double residual = 0.0;  // ‖E′(u) + ωu‖ / ‖u‖
  int iterations = 0;
  int rejected_steps = 0;
};

/// Normalized gradient flow on {M(u) = ρ}.
MinimizerResult minimize_energy(double rho, const Grid& grid, const ModelParams& model,
                                const MinimizerOptions& options = {});

struct ScalingWitness {
  double mu = 1.0;
  double energy = 0.0;       // E(u_μ) evaluated on the rescaled grid
  double closed_form = 0.0;  // μ²E(u) − (λ/2)μ² ln(1/μ²)∫|u|⁴
};

/// Halves μ from 1 until u_μ(x) = μu(μx) has negative energy (2D log model).
ScalingWitness negative_energy_witness(const ComplexField& field, const ModelParams& model);

}  // namespace lognls
