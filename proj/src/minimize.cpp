#include "lognls/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <cstdio>
#include <string>

#include "lognls/errors.hpp"

namespace lognls {

namespace {

double mass_of(const ComplexField& u) {
  double s = 0.0;
  for (const auto& v : u.values()) s += std::norm(v);
  return s * u.grid().cell_volume();
}

void scale_to_mass(ComplexField& u, double rho) {
  const double m = mass_of(u);
  const double s = std::sqrt(rho / m);
  for (auto& v : u.values()) v *= s;
}

// Energy split into kinetic and potential so acceptance can use a roundoff-aware margin.
std::pair<double, double> energy_parts(const ComplexField& u, const ModelParams& model) {
  const auto spec = transform(u);
  const auto k2 = wavenumber_squared(u.grid());
  double kin = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) kin += k2[i] * std::norm(spec[i]);
  kin *= 0.5 * u.grid().cell_volume() / static_cast<double>(u.size());
  double pot = 0.0;
  for (const auto& v : u.values()) pot += energy_density(std::norm(v), model);
  return {kin, pot * u.grid().cell_volume()};
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double inner_re(const ComplexField& a, const ComplexField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (std::conj(a[i]) * b[i]).real();
  return s * a.grid().cell_volume();
}

}  // namespace

ComplexField gradient_E(const ComplexField& field, const ModelParams& model) {
  require_finite(field, "gradient_E");
  ComplexField out = laplacian(field);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = -0.5 * out[i] + phase_rate(std::norm(field[i]), model) * field[i];
  }
  return out;
}

double energy_functional(const ComplexField& field, const ModelParams& model) {
  require_finite(field, "energy_functional");
  const auto [kin, pot] = energy_parts(field, model);
  return kin + pot;
}

MinimizerResult minimize_energy(double rho, const Grid& grid, const ModelParams& model,
                                const MinimizerOptions& opt) {
  if (!(rho > 0.0)) throw Error(ErrorCode::NonPositiveRho, "rho must be positive");
  if (!(model.lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  if (grid.dim != model.dim()) throw Error(ErrorCode::InvalidArgument, "grid.dim does not match the model");

  ComplexField u(grid);
  if (opt.warm_start) {
    if (!(opt.warm_start->grid() == grid)) throw Error(ErrorCode::SizeMismatch, "warm start grid differs");
    u = *opt.warm_start;
  } else {
    double x[2] = {0.0, 0.0};
    const double w2 = opt.initial_width * opt.initial_width;
    for (std::size_t i = 0; i < u.size(); ++i) {
      coordinates_of(grid, i, x);
      u[i] = std::exp(-(x[0] * x[0] + x[1] * x[1]) / (2.0 * w2));
    }
  }
  scale_to_mass(u, rho);

  const bool precond = opt.preconditioned.value_or(grid.n >= 512);
  const auto k2 = wavenumber_squared(grid);
  double stiff = 0.0;
  for (double v : k2) stiff = std::max(stiff, precond ? 0.5 * v / (1.0 + v) : 0.5 * v);
  const double tau0 = 0.1 / (1.0 + stiff);
  double tau = tau0;

  MinimizerResult res{u, 0.0, 0.0, 0.0, 0, 0};
  // Projected gradient E′(u) + ωu and its relative L² norm.
  auto tangent = [&](const ComplexField& v, double& omega, double& residual) {
    ComplexField g = gradient_E(v, model);
    const double m = mass_of(v);
    omega = -inner_re(g, v) / m;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += omega * v[i];
    residual = std::sqrt(mass_of(g) / m);
    return g;
  };
  auto [kin, pot] = energy_parts(u, model);
  double omega = 0.0, residual = 0.0;
  ComplexField g = tangent(u, omega, residual);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0;; ++it) {
    res.lagrange_omega = omega;
    res.residual = residual;
    res.iterations = it;
    res.energy = kin + pot;
    if (residual <= opt.tol) break;
    if (it >= opt.max_iterations) {
      throw Error(ErrorCode::MaxIterations,
                  "minimize_energy: residual " + sci(residual) + " after " + std::to_string(it) + " iterations");
    }
    ComplexField d = g;
    if (precond) {
      auto spec = transform(d);
      for (std::size_t i = 0; i < spec.size(); ++i) spec[i] /= 1.0 + k2[i];
      d = inverse_transform(grid, std::move(spec));
    }
    const double slope = inner_re(g, d);
    // Accept when the energy does not rise beyond roundoff. Once the predicted
    // decrease drops below that floor, fall back to the residual.
    const double margin = 8.0 * eps * (std::abs(kin) + std::abs(pot));
    for (;;) {
      ComplexField trial = u;
      for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= tau * d[i];
      scale_to_mass(trial, rho);
      const auto [tk, tp] = energy_parts(trial, model);
      bool accept = tk + tp <= kin + pot + margin;
      double t_omega = 0.0, t_residual = 0.0;
      ComplexField tg = accept || tau * slope <= 100.0 * margin ? tangent(trial, t_omega, t_residual) : ComplexField(grid);
      if (!accept && tau * slope <= 100.0 * margin) accept = t_residual < residual;
      if (accept) {
        u = std::move(trial);
        g = std::move(tg);
        kin = tk;
        pot = tp;
        omega = t_omega;
        residual = t_residual;
        tau *= 1.25;
        break;
      }
      tau *= 0.5;
      ++res.rejected_steps;
      if (tau < 1e-12 * tau0) {
        throw Error(ErrorCode::MaxIterations, "minimize_energy: step size collapsed at residual " + sci(residual));
      }
    }
  }
  res.field = std::move(u);
  return res;
}

ScalingWitness negative_energy_witness(const ComplexField& field, const ModelParams& model) {
  if (model.family != Family::CubicLog2D) {
    throw Error(ErrorCode::InvalidArgument, "negative_energy_witness is defined for the 2D log model");
  }
  if (!(model.lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  require_finite(field, "negative_energy_witness");
  const Grid& g = field.grid();
  const double e0 = energy_functional(field, model);
  double quartic = 0.0;
  for (const auto& v : field.values()) quartic += std::norm(v) * std::norm(v);
  quartic *= g.cell_volume();
  if (!(quartic > 0.0)) throw Error(ErrorCode::InvalidArgument, "negative_energy_witness needs a nonzero field");

  ScalingWitness w;
  for (double mu = 1.0; mu >= 1e-8; mu *= 0.5) {
    // u_μ samples μu on the grid stretched by 1/μ.
    ComplexField scaled(Grid::make(g.dim, g.n, g.half_width / mu));
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = mu * field[i];
    w.mu = mu;
    w.energy = energy_functional(scaled, model);
    w.closed_form = mu * mu * e0 - 0.5 * model.lambda * mu * mu * std::log(1.0 / (mu * mu)) * quartic;
    if (std::abs(w.energy - w.closed_form) > 1e-6 * std::max(std::abs(w.closed_form), mu * mu * std::abs(e0))) {
      throw Error(ErrorCode::QuadratureFailure, "rescaled energy disagrees with the scaling law");
    }
    if (w.energy < 0.0) return w;
  }
  throw Error(ErrorCode::ExhaustedScaling, "no negative energy down to mu = 1e-8");
}

}  // namespace lognls
