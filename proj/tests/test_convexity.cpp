#include <gtest/gtest.h>

#include <cmath>

#include "lognls/convexity.hpp"
#include "lognls/errors.hpp"
#include "lognls/model.hpp"
#include "lognls/radial.hpp"

using namespace lognls;

namespace {

const double kEdge = 1.0 / (6.0 * std::exp(1.0 / 3.0));

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(TurningPoint, SolvesScalarEquation) {
  const auto tp = find_turning_point(1.0, 0.05);
  EXPECT_NEAR(tp.a, 0.3187, 1e-3);
  EXPECT_NEAR(tp.W_prime_at_a, -0.066, 1e-3);
  EXPECT_LT(std::abs(turning_W(tp, tp.a)), 1e-12);
  EXPECT_NEAR(tp.W_prime_at_a, 0.05 + tp.a * tp.a * std::log(tp.a), 1e-15);
  for (int i = 1; i < 1000; ++i) EXPECT_GT(turning_W(tp, tp.a * i / 1000.0), 0.0);
}

TEST(TurningPoint, EdgeAndSmallOmega) {
  const auto near_edge = find_turning_point(1.0, kEdge * (1 - 1e-8));
  EXPECT_NEAR(near_edge.a, std::exp(-1.0 / 6.0), 1e-3);
  EXPECT_GT(near_edge.W_prime_at_a, -1e-3);
  // ω → 0: a ≈ 3ω/(λ|ln|) balance; check the scalar equation directly.
  const auto small = find_turning_point(1.0, 1e-4);
  EXPECT_LT(small.a, 0.05);
  EXPECT_NEAR(small.a * small.a * (std::log(small.a) - 1.0 / 3.0), -3e-4, 1e-15);
  EXPECT_EQ(code_of([] { find_turning_point(1.0, kEdge); }), ErrorCode::OmegaOutOfWindow);
  EXPECT_EQ(code_of([] { find_turning_point(1.0, 0.0); }), ErrorCode::OmegaOutOfWindow);
  EXPECT_EQ(code_of([] { find_turning_point(-1.0, 0.01); }), ErrorCode::NonPositiveLambda);
}

TEST(Dpp, PositiveWithConstantFormRatio) {
  for (double w = 0.01; w < 0.115; w += 0.01) {
    const auto d = dpp_quadrature(1.0, w);
    EXPECT_GT(d.value, 0.0);
    EXPECT_NEAR(d.simplified / d.general, 3.0, 1e-8) << w;
    EXPECT_LT(d.error_estimate, 1e-8);
  }
  EXPECT_NEAR(dpp_quadrature(2.0, 0.05).simplified / dpp_quadrature(2.0, 0.05).general, 1.5, 1e-8);
}

TEST(Dpp, EndpointIntegrandFiniteAfterSubstitution) {
  const auto tp = find_turning_point(1.0, 0.05);
  // With s = a − t², the t-integrand 2t·f(a − t²) has a finite limit at t = 0.
  const double t1 = 1e-4, t2 = 1e-6;
  const double v1 = 2 * t1 * dpp_general_integrand(tp, t1 * t1);
  const double v2 = 2 * t2 * dpp_general_integrand(tp, t2 * t2);
  EXPECT_TRUE(std::isfinite(v2));
  EXPECT_NEAR(v1, v2, 1e-6 * std::abs(v2));
}

TEST(Dpp, GuardsNearEdge) {
  EXPECT_EQ(code_of([] { dpp_quadrature(1.0, 0.96 * kEdge); }), ErrorCode::OmegaTooCloseToEdge);
  EXPECT_GT(dpp_quadrature(1.0, 0.94 * kEdge).value, 0.0);
}

TEST(Profile1D, ShapeAndAmplitude) {
  const auto p = ground_state_1d_quadrature(1.0, 0.05, 2001);
  const auto tp = find_turning_point(1.0, 0.05);
  EXPECT_NEAR(p.phi_max * p.phi_max, tp.a, 1e-10);
  const std::size_t n = p.x_nodes.size(), mid = n / 2;
  EXPECT_EQ(p.x_nodes[mid], 0.0);
  EXPECT_EQ(p.values[mid], p.phi_max);
  for (std::size_t j = 1; j <= mid; ++j) {
    EXPECT_EQ(p.values[mid + j], p.values[mid - j]);
    EXPECT_EQ(p.x_nodes[mid + j], -p.x_nodes[mid - j]);
    EXPECT_LT(p.values[mid + j], p.values[mid + j - 1]);
  }
}

TEST(Profile1D, ExponentialTail) {
  const double w = 0.05, kappa = std::sqrt(2 * w);
  const auto p = ground_state_1d_quadrature(1.0, w, 2001);
  const std::size_t n = p.x_nodes.size();
  // Over the last decade of the domain φ·e^{κx} is constant to 5%.
  const double ref = p.values[n - 1] * std::exp(kappa * p.x_nodes[n - 1]);
  for (std::size_t j = n - 200; j < n; ++j) {
    EXPECT_NEAR(p.values[j] * std::exp(kappa * p.x_nodes[j]) / ref, 1.0, 0.05);
  }
}

TEST(Profile1D, AgreesWithShooting) {
  for (double w : {0.02, 0.05, 0.1}) {
    const auto p = ground_state_1d_quadrature(1.0, w, 4001);
    const auto shot = find_ground_state(ModelParams{Family::QuinticLog1D, 1.0, w});
    double err = 0;
    for (std::size_t i = 0; i < p.x_nodes.size(); ++i) {
      const double x = std::abs(p.x_nodes[i]);
      if (x > shot.last_node()) continue;
      err = std::max(err, std::abs(shot.value_at(x) - p.values[i]));
    }
    EXPECT_LT(err, 1e-8) << w;
    EXPECT_NEAR(p.mass, radial_integrals(shot).mass, 1e-8 * p.mass);
  }
}

TEST(Profile1D, IntegralsStableUnderRefinement) {
  const auto a = ground_state_1d_quadrature(1.0, 0.07, 1001);
  const auto b = ground_state_1d_quadrature(1.0, 0.07, 2001);
  EXPECT_NEAR(a.mass, b.mass, 1e-9 * a.mass);
  EXPECT_NEAR(a.action, b.action, 1e-9 * a.action);
}

TEST(Scan, FiniteDifferenceAgreement) {
  const auto scan = action_convexity_scan(1.0, {0.01, 0.04, 0.08, 0.1});
  EXPECT_TRUE(scan.all_positive);
  EXPECT_TRUE(scan.mass_increasing);
  EXPECT_TRUE(scan.signs_agree);
  EXPECT_LT(scan.max_fd_rel_error, 1e-2);
  for (const auto& r : scan.rows) {
    ASSERT_TRUE(r.dpp_fd && r.dpp_fd_half);
    // Richardson pair: the half step lies closer to the quadrature value.
    EXPECT_LE(std::abs(*r.dpp_fd_half - r.dpp_quad), std::abs(*r.dpp_fd - r.dpp_quad) + 1e-6 * r.dpp_quad);
  }
}

TEST(Scan, SinglePointAndStencilOutsideWindow) {
  const auto one = action_convexity_scan(1.0, {0.05});
  ASSERT_EQ(one.rows.size(), 1u);
  EXPECT_TRUE(one.rows[0].dpp_fd.has_value());
  const auto edge = action_convexity_scan(1.0, {5e-5});
  EXPECT_FALSE(edge.rows[0].dpp_fd.has_value());
  EXPECT_TRUE(edge.rows[0].dpp_fd_half.has_value() == false);
}
