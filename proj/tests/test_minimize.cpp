#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lognls/errors.hpp"
#include "lognls/evolution.hpp"
#include "lognls/minimize.hpp"
#include "lognls/observables.hpp"
#include "lognls/radial.hpp"

using namespace lognls;

namespace {

const ModelParams kLog{Family::CubicLog2D, 1.0, std::nullopt};

double l2(const ComplexField& u) {
  double s = 0;
  for (const auto& v : u.values()) s += std::norm(v);
  return std::sqrt(s * u.grid().cell_volume());
}

ComplexField smooth_random(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double cx = U(rng), cy = U(rng), kx = U(rng), ky = U(rng), a = 1.0 + 0.3 * U(rng);
  ComplexField u(g);
  double x[2];
  for (std::size_t i = 0; i < u.size(); ++i) {
    coordinates_of(g, i, x);
    const double r2 = (x[0] - cx) * (x[0] - cx) + 0.7 * (x[1] - cy) * (x[1] - cy);
    u[i] = std::polar(a * std::exp(-0.5 * r2), kx * x[0] + ky * x[1] * x[1] * 0.1);
  }
  return u;
}

}  // namespace

TEST(GradientE, VanishesOnZeroField) {
  const auto g = Grid::make(2, 32, 5.0);
  const auto grad = gradient_E(ComplexField(g), kLog);
  for (const auto& v : grad.values()) EXPECT_EQ(v, Complex(0.0, 0.0));
}

TEST(GradientE, GroundStateIsStationary) {
  const ModelParams m = kLog.with_omega(0.1);
  const auto profile = find_ground_state(m);
  const auto g = Grid::make(2, 256, 40.0);
  const auto u = embed_radial(profile, g);
  auto r = gradient_E(u, m);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += 0.1 * u[i];
  EXPECT_LE(l2(r), 1e-6 * l2(u));
}

TEST(GradientE, MatchesDirectionalDerivative) {
  const auto g = Grid::make(2, 64, 8.0);
  const auto u = smooth_random(g, 3);
  const auto v = smooth_random(g, 4);
  const auto grad = gradient_E(u, kLog);
  double pairing = 0;
  for (std::size_t i = 0; i < u.size(); ++i) pairing += (std::conj(grad[i]) * v[i]).real();
  pairing *= 2.0 * g.cell_volume();
  double err[2];
  int k = 0;
  for (double eps : {1e-3, 1e-4}) {
    ComplexField up = u, um = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
      up[i] += eps * v[i];
      um[i] -= eps * v[i];
    }
    err[k++] = std::abs((energy_functional(up, kLog) - energy_functional(um, kLog)) / (2 * eps) - pairing);
  }
  EXPECT_LT(err[0], 1e-5 * std::abs(pairing));
  // O(ε²): the error shrinks by about 100 for a tenfold smaller ε, until roundoff.
  EXPECT_LT(err[1], 0.04 * err[0] + 1e-9);
}

TEST(EnergyFunctional, AgreesWithObservables) {
  const auto g = Grid::make(2, 64, 8.0);
  const auto u = smooth_random(g, 11);
  EXPECT_NEAR(energy_functional(u, kLog), observables(u, kLog).energy, 1e-13);
}

TEST(Minimize, RecoversShootingGroundState) {
  const ModelParams m = kLog.with_omega(0.2);
  const auto profile = find_ground_state(m);
  const double rho = radial_integrals(profile).mass;
  const auto g = Grid::make(2, 128, 24.0);
  MinimizerOptions opt;
  opt.preconditioned = true;
  const auto r = minimize_energy(rho, g, kLog, opt);
  EXPECT_LE(r.residual, opt.tol);
  EXPECT_NEAR(l2(r.field) * l2(r.field), rho, 1e-12 * rho);
  EXPECT_NEAR(r.lagrange_omega, 0.2, 1e-3);
  EXPECT_LT(r.energy, 0.0);
  EXPECT_LT(orbit_distance(r.field, profile).distance, 1e-3);
  // Pohozaev with the estimated multiplier: V = −(ωM + ∫F) = 0.
  const auto obs = observables(r.field, kLog);
  EXPECT_LT(std::abs(obs.V(r.lagrange_omega)) / std::abs(obs.potential), 1e-4);
  // Radially non-increasing modulus along a ray from the peak.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < r.field.size(); ++i) {
    if (std::abs(r.field[i]) > std::abs(r.field[peak])) peak = i;
  }
  const int n = g.n, pi = static_cast<int>(peak / n), pj = static_cast<int>(peak % n);
  for (int s = 1; s < n / 2; ++s) {
    const double cur = std::abs(r.field[static_cast<std::size_t>(pi) * n + (pj + s) % n]);
    const double prev = std::abs(r.field[static_cast<std::size_t>(pi) * n + (pj + s - 1) % n]);
    EXPECT_LE(cur, prev + 1e-12);
  }
}

TEST(Minimize, UnpreconditionedFlowDecreasesEnergy) {
  const auto g = Grid::make(2, 32, 8.0);
  MinimizerOptions opt;
  opt.tol = 1e-4;
  const auto r = minimize_energy(2.0, g, kLog, opt);
  EXPECT_LE(r.residual, 1e-4);
  EXPECT_LT(r.energy, 0.0);
}

TEST(Minimize, TinyMassMultiplierInsideWindow) {
  const auto g = Grid::make(2, 64, 16.0);
  MinimizerOptions opt;
  opt.preconditioned = true;
  opt.tol = 1e-7;
  const auto r = minimize_energy(1e-3, g, kLog, opt);
  EXPECT_TRUE(omega_window(kLog).contains(r.lagrange_omega)) << r.lagrange_omega;
  EXPECT_LT(r.energy, 0.0);
}

TEST(Minimize, Rejections) {
  const auto g = Grid::make(2, 32, 8.0);
  try {
    minimize_energy(0.0, g, kLog);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveRho);
  }
  MinimizerOptions opt;
  opt.max_iterations = 3;
  try {
    minimize_energy(3.0, g, kLog, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
  }
}

TEST(Witness, UnitGaussianClosedForm) {
  const auto g = Grid::make(2, 128, 10.0);
  ComplexField u(g);
  double x[2];
  for (std::size_t i = 0; i < u.size(); ++i) {
    coordinates_of(g, i, x);
    u[i] = std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1]));
  }
  // E(u) = π/4 > 0 and ∫|u|⁴ = π/2, so E(u_μ) = μ²(π/4)(1 − ln(1/μ²)) turns negative below e^{−1/2}.
  const auto w = negative_energy_witness(u, kLog);
  EXPECT_EQ(w.mu, 0.5);
  const double expect = 0.25 * std::numbers::pi / 4 * (1 - std::log(4.0));
  EXPECT_NEAR(w.energy, expect, 1e-10);
  EXPECT_NEAR(w.closed_form, expect, 1e-10);
}

TEST(Witness, GroundStateAlreadyNegative) {
  const auto profile = find_ground_state(kLog.with_omega(0.1));
  const auto u = embed_radial(profile, Grid::make(2, 128, 24.0));
  const auto w = negative_energy_witness(u, kLog);
  EXPECT_EQ(w.mu, 1.0);
  EXPECT_NEAR(w.energy, energy_functional(u, kLog), 1e-14);
  EXPECT_NEAR(w.energy, w.closed_form, 1e-6 * std::abs(w.closed_form));
}

TEST(Witness, RejectsOtherFamiliesAndZero) {
  const auto g = Grid::make(2, 16, 4.0);
  EXPECT_THROW(negative_energy_witness(ComplexField(g), kLog), Error);
  ComplexField u(g);
  u[0] = 1.0;
  EXPECT_THROW(negative_energy_witness(u, ModelParams{Family::PureCubic2D, 1.0, std::nullopt}), Error);
}
