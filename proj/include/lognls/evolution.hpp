#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lognls/errors.hpp"
#include "lognls/grid.hpp"
#include "lognls/model.hpp"
#include "lognls/observables.hpp"
#include "lognls/radial.hpp"

namespace lognls {

/// Strang splitting with a cached linear half-step multiplier.
class SplitStepper {
 public:
  SplitStepper(const Grid& grid, const ModelParams& model, double dt);

  void step(ComplexField& field) const;
  double dt() const noexcept { return dt_; }

 private:
  Grid grid_;
  ModelParams model_;
  double dt_;
  std::vector<Complex> half_linear_;
};

/// One Strang step: half free flow, exact nonlinear phase, half free flow.
ComplexField strang_step(const ComplexField& field, double dt, const ModelParams& model);

/// Free-flow closed form for a centred Gaussian A·e^{−|x|²/(2w²)} at time t
/// (λ = 0), used as a validation oracle.
Complex free_gaussian(double amplitude, double width, const double* x, int dim, double t);

struct OrbitResult {
  double distance = 0.0;
  double theta = 0.0;
  std::array<double, 2> shift{};
};

/// Distance in H¹ from a field to the orbit {e^{iθ}φ(· − y)}.
class OrbitMeter {
 public:
  OrbitMeter(const RadialProfile& profile, const Grid& grid);
  OrbitResult measure(const ComplexField& field) const;
  double reference_h1_norm_sq() const noexcept { return ref_norm_sq_; }

 private:
  Grid grid_;
  std::vector<Complex> ref_hat_;
  std::vector<double> weight_;  // 1 + |k|²
  double ref_norm_sq_ = 0.0;
};

OrbitResult orbit_distance(const ComplexField& field, const RadialProfile& profile);

/// ‖u‖²_{H¹} = ∫|u|² + |∇u|² (spectral).
double h1_norm_sq(const ComplexField& field);

// ---- initial data and perturbations ----

struct GroundStateInit {
  double omega = 0.1;
  std::array<double, 2> center{};
  double phase = 0.0;
  std::array<double, 2> boost{};
};

struct GaussianInit {
  double amplitude = 1.0;
  double width = 1.0;
  std::array<double, 2> center{};
  std::array<double, 2> boost{};
};

struct SnapshotInit {
  std::string path;
};

using InitialData = std::variant<GroundStateInit, GaussianInit, SnapshotInit>;

enum class PerturbationMode { GaussianBump, Fourier, Scale };

std::string_view to_string(PerturbationMode mode);
PerturbationMode perturbation_mode_from_string(std::string_view name);

struct Perturbation {
  double delta = 1e-2;  // H¹ norm of the added perturbation
  PerturbationMode mode = PerturbationMode::GaussianBump;
  bool renormalize_mass = false;
  std::array<double, 2> bump_center{};  // gaussian_bump
  double bump_width = 1.0;
  std::array<int, 2> fourier_mode{2, 1};  // fourier: (π/L)·m per axis
  std::uint64_t seed = 0;                 // fourier: random phase
};

/// u + δ·v/‖v‖_{H¹}, optionally rescaled back to the mass of u.
ComplexField apply_perturbation(const ComplexField& u, const Perturbation& p);

/// Builds the initial field. Ground-state data also returns the profile.
struct PreparedInitial {
  ComplexField field;
  std::shared_ptr<const RadialProfile> profile;
};

PreparedInitial prepare_initial(const InitialData& init, const Grid& grid, const ModelParams& model,
                                double ground_tol = 1e-10);

// ---- time evolution ----

struct EvolutionConfig {
  ModelParams model;
  Grid grid;
  double dt = 1e-3;
  double t_final = 1.0;
  int sample_every = 10;
  std::optional<ComplexField> initial;
  // Optional diagnostics.
  std::shared_ptr<const RadialProfile> orbit_reference;
  bool monitor_pseudoconformal = false;
  std::vector<double> snapshot_times;
  // When false, blow-up or non-finite fields end the run and are reported
  // in Trajectory::aborted instead of being thrown.
  bool throw_on_abort = true;
  // ‖∇u‖² threshold for BlowUpDetected; unset means min(1e6, 0.05·kmax²·M₀).
  std::optional<double> blowup_threshold;
  // Allows negative dt (time reversal checks).
  bool allow_negative_dt = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Observables> samples;
  std::vector<double> orbit_distances;
  std::vector<double> pc_quantity;
  std::vector<double> pc_source;  // ∫[2F − d(ρF′ − F)], the pc law reads d/dt pc = t·pc_source
  std::vector<std::pair<double, ComplexField>> snapshots;
  std::optional<ComplexField> final_field;

  double h1_bound = 0.0;
  double blowup_threshold = 0.0;
  double max_mass_drift = 0.0;
  double max_energy_drift = 0.0;
  double max_momentum_drift = 0.0;
  double max_bound_excess = -1e300;  // max(½‖∇u‖² − bound)
  std::optional<ErrorCode> aborted;
  double abort_time = 0.0;
  std::string abort_message;
};

/// Validates the configuration (dt ≤ 1e−2, positive sizes).
void validate(const EvolutionConfig& config);

Trajectory evolve(const EvolutionConfig& config);

/// Centred differences of pc_quantity against t·pc_source, normalised by
/// max(|pc|, 1). Needs uniformly spaced samples.
double pseudoconformal_residual(const Trajectory& trajectory);

/// ½‖J(t)u‖² + t²∫F(|u|²).
double pseudoconformal_quantity(const ComplexField& field, const ModelParams& model, double t,
                                double potential);
/// ∫[2F(ρ) − d(ρF′(ρ) − F(ρ))]; equals −λ∫|u|⁴ for the 2D log model.
double pseudoconformal_source(const ComplexField& field, const ModelParams& model);

}  // namespace lognls
