#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lognls/errors.hpp"
#include "lognls/grid.hpp"
#include "lognls/model.hpp"
#include "lognls/observables.hpp"

using namespace lognls;

namespace {

ModelParams cubic_log(double lambda = 1.0, std::optional<double> omega = std::nullopt) {
  return ModelParams{Family::CubicLog2D, lambda, omega};
}

// Independent root oracle: plain Newton on y ln y + c from a fixed start.
double newton_ylny(double c, double y) {
  for (int i = 0; i < 100; ++i) y -= (y * std::log(y) + c) / (std::log(y) + 1.0);
  return y;
}

ComplexField gaussian2d(const Grid& g, double vx = 0.0) {
  ComplexField f(g);
  double x[2];
  for (std::size_t i = 0; i < f.size(); ++i) {
    coordinates_of(g, i, x);
    f[i] = std::polar(std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1])), vx * x[0]);
  }
  return f;
}

}  // namespace

TEST(OmegaWindow, ClosedForms) {
  EXPECT_NEAR(omega_window(cubic_log()).hi, 0.5 / std::exp(0.5), 1e-16);
  EXPECT_NEAR(omega_window(cubic_log()).hi, 0.3032653299, 1e-10);
  EXPECT_NEAR(omega_window(cubic_log(2.0)).hi, 0.6065306597, 1e-10);
  EXPECT_NEAR(omega_window({Family::QuinticLog1D, 1.0, {}}).hi, 1.0 / (6.0 * std::cbrt(std::exp(1.0))), 1e-16);
  EXPECT_NEAR(omega_window({Family::QuinticLog1D, 1.0, {}}).hi, 0.119422, 1e-5);
  EXPECT_TRUE(std::isinf(omega_window({Family::PureCubic2D, 1.0, {}}).hi));
  EXPECT_EQ(omega_window(cubic_log()).lo, 0.0);
}

TEST(OmegaWindow, RejectsNonPositiveLambda) {
  try {
    omega_window(cubic_log(0.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveLambda);
  }
}

TEST(AmplitudeRoots, MatchNewtonOracle) {
  const auto roots = amplitude_roots(cubic_log(1.0, 0.1));
  const double z = newton_ylny(0.1, 0.9);
  const double a2 = newton_ylny(0.1, 0.02);
  EXPECT_NEAR(roots.sqrt_z_omega * roots.sqrt_z_omega, z, 1e-14);
  EXPECT_NEAR(roots.alpha * roots.alpha, a2, 1e-14);
  EXPECT_NEAR(z, 0.8935, 1e-3);
  EXPECT_NEAR(a2, 0.0280, 1e-4);
  EXPECT_LT(roots.alpha, roots.sqrt_z_omega);
}

TEST(AmplitudeRoots, ResidualsAndOrdering) {
  for (double w : {1e-6, 1e-3, 0.05, 0.1, 0.2, 0.29, 0.3}) {
    const auto r = amplitude_roots(cubic_log(1.0, w));
    const double y1 = r.alpha * r.alpha, y2 = r.sqrt_z_omega * r.sqrt_z_omega;
    EXPECT_NEAR(y1 * std::log(y1), -w, 1e-12);
    EXPECT_NEAR(y2 * std::log(y2), -w, 1e-12);
    EXPECT_LT(y1, std::exp(-1.0));
    EXPECT_GT(y2, std::exp(-1.0));
  }
}

TEST(AmplitudeRoots, SmallOmegaLimit) {
  const auto r = amplitude_roots(cubic_log(1.0, 1e-12));
  EXPECT_GT(r.sqrt_z_omega, 1.0 - 1e-10);
  EXPECT_LT(r.alpha, 1e-5);
}

TEST(AmplitudeRoots, OutsideWindow) {
  try {
    amplitude_roots(cubic_log(1.0, 0.31));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OmegaOutOfWindow);
  }
}

TEST(NonlinearTerm, ClosedFormValues) {
  const auto m = cubic_log();
  EXPECT_EQ(nonlinear_term(0.0, m), 0.0);
  EXPECT_EQ(nonlinear_term(1.0, m), 0.0);
  EXPECT_NEAR(nonlinear_term(std::exp(-0.5), m), -std::exp(-1.5), 1e-15);
  EXPECT_NEAR(nonlinear_term(std::exp(-0.5), m), -0.22313, 1e-5);
  EXPECT_NEAR(nonlinear_term(2.0, {Family::PureCubic2D, 1.5, {}}), -12.0, 1e-14);
  EXPECT_THROW(nonlinear_term(-1e-3, m), Error);
}

TEST(NonlinearTerm, FocusingBelowOneDefocusingAbove) {
  const auto m = cubic_log();
  for (int i = 1; i < 2000; ++i) {
    const double z = i / 2000.0;
    EXPECT_LT(nonlinear_term(z, m), 0.0);
    EXPECT_GT(nonlinear_term(1.0 + z, m), 0.0);
  }
}

TEST(NonlinearTerm, ContinuousAtZero) {
  const auto m = cubic_log();
  EXPECT_LT(std::abs(nonlinear_term(1e-100, m)), 1e-290);
  EXPECT_EQ(nonlinear_term(1e-160, m), 0.0);
}

TEST(PotentialG, HilltopValue) {
  const auto m = cubic_log(1.0, 0.1);
  const double z = std::exp(-0.25);
  EXPECT_NEAR(potential_G(z, m), (1.0 / std::exp(0.5)) * (0.5 / std::exp(0.5) - 0.1), 1e-15);
  EXPECT_EQ(potential_G(0.0, m), 0.0);
}

TEST(PotentialG, DerivativeIsG) {
  for (auto fam : {Family::CubicLog2D, Family::QuinticLog1D, Family::PureCubic2D}) {
    const ModelParams m{fam, 1.0, 0.05};
    for (double z = 0.05; z < 1.5; z += 0.05) {
      const double h = 1e-5;
      const double fd = (potential_G(z + h, m) - potential_G(z - h, m)) / (2 * h);
      EXPECT_NEAR(fd, stationary_g(z, m), 1e-8) << to_string(fam) << " z=" << z;
    }
  }
}

TEST(PotentialG, GtildeDecomposition) {
  const auto m = cubic_log(1.0, 0.1);
  for (int i = 0; i <= 1000; ++i) {
    const double z = i / 1000.0;
    EXPECT_NEAR(potential_G(z, m), m.lambda * z * z * gtilde(z, m), 1e-15);
  }
}

TEST(PotentialG, QuinticZero) {
  const ModelParams m{Family::QuinticLog1D, 1.0, 0.05};
  const double z = potential_zero(m);
  EXPECT_NEAR(z * z, 0.3185, 5e-4);
  EXPECT_NEAR(potential_G(z, m), 0.0, 1e-15);
}

TEST(PotentialG, MissingOmega) {
  try {
    potential_G(0.5, cubic_log());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingOmega);
  }
}

TEST(EnergyDensity, DerivativeMatchesPhaseRate) {
  for (auto fam : {Family::CubicLog2D, Family::QuinticLog1D, Family::PureCubic2D}) {
    const ModelParams m{fam, 0.7, {}};
    for (double rho = 0.05; rho < 2.0; rho += 0.1) {
      const double h = 1e-6;
      const double fd = (energy_density(rho + h, m) - energy_density(rho - h, m)) / (2 * h);
      EXPECT_NEAR(fd, phase_rate(rho, m), 1e-8);
    }
  }
}

TEST(Observables, GaussianClosedForms) {
  const auto g = Grid::make(2, 256, 10.0);
  const auto obs = observables(gaussian2d(g), cubic_log());
  EXPECT_NEAR(obs.mass, std::numbers::pi, 1e-12);
  EXPECT_NEAR(obs.energy, std::numbers::pi / 4.0, 1e-12);
  EXPECT_NEAR(obs.kinetic, std::numbers::pi / 2.0, 1e-12);
  EXPECT_NEAR(obs.potential, -std::numbers::pi / 4.0, 1e-12);
  EXPECT_NEAR(obs.momentum[0], 0.0, 1e-13);
  EXPECT_NEAR(obs.momentum[1], 0.0, 1e-13);
  EXPECT_DOUBLE_EQ(obs.energy, obs.kinetic + obs.potential);
}

TEST(Observables, BoostedGaussianMomentum) {
  // L = 10π makes v = 1 a grid wavenumber.
  const auto g2 = Grid::make(2, 256, 10.0 * std::numbers::pi);
  const auto obs = observables(gaussian2d(g2, 1.0), cubic_log());
  EXPECT_NEAR(obs.momentum[0], std::numbers::pi, 1e-10);
  EXPECT_NEAR(obs.momentum[1], 0.0, 1e-12);
  EXPECT_NEAR(obs.mass, std::numbers::pi, 1e-12);
}

TEST(Observables, ZeroField) {
  const auto g = Grid::make(2, 32, 5.0);
  const auto obs = observables(ComplexField(g), cubic_log(1.0, 0.1));
  EXPECT_EQ(obs.mass, 0.0);
  EXPECT_EQ(obs.energy, 0.0);
  EXPECT_EQ(obs.quartic, 0.0);
  EXPECT_EQ(*obs.action, 0.0);
}

TEST(Observables, GaugeAndShiftInvariance) {
  const auto g = Grid::make(2, 128, 10.0);
  const auto base = gaussian2d(g, 0.0);
  const auto o0 = observables(base, cubic_log());
  ComplexField rotated(g), shifted(g);
  for (std::size_t i = 0; i < base.size(); ++i) rotated[i] = base[i] * std::polar(1.0, 0.7);
  const int s = 5;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      shifted[static_cast<std::size_t>((i + s) % g.n) * g.n + (j + 2 * s) % g.n] = base[static_cast<std::size_t>(i) * g.n + j];
  for (const auto* f : {&rotated, &shifted}) {
    const auto o = observables(*f, cubic_log());
    EXPECT_NEAR(o.mass, o0.mass, 1e-13);
    EXPECT_NEAR(o.energy, o0.energy, 1e-13);
    EXPECT_NEAR(o.quartic, o0.quartic, 1e-13);
    EXPECT_NEAR(o.momentum[0], o0.momentum[0], 1e-13);
  }
}

TEST(Observables, NonFiniteRejected) {
  const auto g = Grid::make(1, 16, 5.0);
  ComplexField f(g);
  f[3] = Complex(std::nan(""), 0.0);
  try {
    observables(f, cubic_log());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteField);
  }
}

TEST(AprioriBound, ClosedForms) {
  const auto g = Grid::make(2, 256, 10.0);
  const auto obs = observables(gaussian2d(g), cubic_log());
  const double pi = std::numbers::pi;
  EXPECT_NEAR(h1_apriori_bound(obs, cubic_log()), pi / 4.0 + 0.5 * std::exp(0.5) * pi, 1e-12);
  EXPECT_EQ(h1_apriori_bound(obs, cubic_log(0.0)), obs.energy);
}
