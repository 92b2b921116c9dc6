#include "lognls/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "lognls/errors.hpp"
#include "lognls/model.hpp"
#include "lognls/quadrature.hpp"
#include "lognls/roots.hpp"

namespace lognls {

namespace {

double window_edge(double lambda) { return lambda / (6.0 * constants::e_third()); }

void check_window(double lambda, double omega) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::NonPositiveLambda, "lambda must be positive");
  if (!(omega > 0.0 && omega < window_edge(lambda))) {
    throw Error(ErrorCode::OmegaOutOfWindow, "omega outside the 1D window (0, lambda/(6 e^{1/3}))");
  }
}

// W(a − d) − W(a) with the cancellation near the turning point removed.
double W_near(const TurningPoint& tp, double d) {
  const double a = tp.a, s = a - d;
  const double l1 = std::log1p(-d / a);
  return -tp.omega * d +
         tp.lambda / 3.0 * (-d * (s * s + s * a + a * a) * (std::log(a) - 1.0 / 3.0) + s * s * s * l1);
}

// Composite Gauss–Legendre on [lo, hi] with panels no wider than width.
template <class F>
double composite(F&& f, double lo, double hi, double width, int order = 20) {
  if (hi == lo) return 0.0;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(hi - lo) / width)));
  const double h = (hi - lo) / panels;
  double s = 0.0;
  for (int p = 0; p < panels; ++p) s += gauss_panel(f, lo + p * h, lo + (p + 1) * h, order);
  return s;
}

// ∫₀ᵃ integrand(d = a − s) ds: s = a − t² on the upper half, geometric panels
// toward s = 0 on the lower half.
double turning_integral(const TurningPoint& tp, const std::function<double(double, double)>& by_sd, int panels) {
  const double a = tp.a;
  const double tc = std::sqrt(0.5 * a);
  const double upper =
      composite([&](double t) { return 2.0 * t * by_sd(a - t * t, t * t); }, 0.0, tc, tc / panels);
  double lower = 0.0;
  double hi = 0.5 * a;
  for (int k = 0; k < 60; ++k) {
    const double lo = 0.5 * hi;
    lower += composite([&](double s) { return by_sd(s, a - s); }, lo, hi, (hi - lo) / std::max(1, panels / 8));
    hi = lo;
  }
  lower += gauss_panel([&](double s) { return by_sd(s, a - s); }, 0.0, hi);
  return upper + lower;
}

}  // namespace

double turning_W(const TurningPoint& tp, double s) {
  if (s <= 0.0) return 0.0;
  return tp.omega * s + tp.lambda / 3.0 * s * s * s * (std::log(s) - 1.0 / 3.0);
}

TurningPoint find_turning_point(double lambda, double omega) {
  check_window(lambda, omega);
  const double c = -3.0 * omega / lambda;
  auto h = [c](double s) { return s * s * (std::log(s) - 1.0 / 3.0) - c; };
  // h(0⁺) = −c > 0 and h(e^{−1/6}) < 0 inside the window; h is decreasing there.
  const double hi = constants::e_sixth_inv();
  const double a = bisect(h, std::numeric_limits<double>::min(), hi, 0.0);
  TurningPoint tp{a, omega + lambda * a * a * std::log(a), omega, lambda};
  if (!(tp.W_prime_at_a < 0.0)) throw Error(ErrorCode::OmegaOutOfWindow, "turning point degenerates at the window edge");
  return tp;
}

namespace {

// Both d″ integrands at s with d = a − s supplied separately: W and the
// differences are formed from d near the turning point and from s elsewhere.
double W_at(const TurningPoint& tp, double s, double d) { return d < 0.5 * tp.a ? W_near(tp, d) : turning_W(tp, s); }

double general_sd(const TurningPoint& tp, double s, double d) {
  const double a = tp.a, lam = tp.lambda;
  if (d <= 0.0) return 0.0;
  if (s <= 0.0) {
    // s → 0: the bracket tends to 3 − a f(a)/g(a) and √(s/W) to 1/√ω.
    const double fa = lam * a * a * std::log(a);
    const double ga = lam / 3.0 * a * a * a * (std::log(a) - 1.0 / 3.0);
    return (3.0 - a * fa / ga) / std::sqrt(tp.omega);
  }
  const double l1 = d < 0.5 * a ? std::log1p(-d / a) : std::log(s / a);
  const double ln_a = std::log(a);
  const double df = lam * (d * (a + s) * ln_a - s * s * l1);                              // f(a) − f(s)
  const double dg = lam / 3.0 * a * s * (-d * (a + s) * (ln_a - 1.0 / 3.0) + s * s * l1);  // a g(s) − s g(a)
  return (3.0 + a * s * df / dg) * std::sqrt(s / W_at(tp, s, d));
}

double simplified_sd(const TurningPoint& tp, double s, double d) {
  if (s <= 0.0 || d <= 0.0) return 0.0;
  const double W = W_at(tp, s, d);
  return d * (tp.a + s) / W * s * std::sqrt(s / W);
}

}  // namespace

double dpp_general_integrand(const TurningPoint& tp, double d) { return general_sd(tp, tp.a - d, d); }

double dpp_simplified_integrand(const TurningPoint& tp, double d) { return simplified_sd(tp, tp.a - d, d); }

DppValue dpp_quadrature(double lambda, double omega) {
  check_window(lambda, omega);
  if (omega > 0.95 * window_edge(lambda)) {
    throw Error(ErrorCode::OmegaTooCloseToEdge, "omega beyond 0.95 of the window edge");
  }
  const TurningPoint tp = find_turning_point(lambda, omega);
  const double pre = -1.0 / (2.0 * tp.W_prime_at_a);
  auto gen = [&](double s, double d) { return general_sd(tp, s, d); };
  auto simp = [&](double s, double d) { return simplified_sd(tp, s, d); };
  const double g1 = pre * turning_integral(tp, gen, 16);
  const double g2 = pre * turning_integral(tp, gen, 32);
  const double s2 = pre * turning_integral(tp, simp, 32);
  DppValue v;
  v.general = g2;
  v.simplified = s2;
  v.error_estimate = std::abs(g2 - g1) / std::abs(g2);
  if (!std::isfinite(g2) || v.error_estimate > 1e-8) {
    throw Error(ErrorCode::QuadratureFailure, "d'' quadrature did not reach 1e-8 relative");
  }
  v.value = g2 / std::numbers::sqrt2;
  return v;
}

Profile1D ground_state_1d_quadrature(double lambda, double omega, int n_nodes) {
  const TurningPoint tp = find_turning_point(lambda, omega);
  if (n_nodes < 2) throw Error(ErrorCode::InvalidArgument, "n_nodes must be at least 2");
  const double pm = std::sqrt(tp.a);
  const double tc = std::sqrt(0.5 * pm);  // φ = pm − t² down to pm/2
  const double yc = std::log(0.5 * pm);   // then φ = e^y

  // dx/dt near the top and −dx/dy in the tail.
  auto h_top = [&](double t) {
    if (t == 0.0) return 2.0 / std::sqrt(2.0 * 2.0 * pm * -tp.W_prime_at_a);
    const double d = t * t * (2.0 * pm - t * t);
    return 2.0 * t / std::sqrt(2.0 * W_near(tp, d));
  };
  auto h_tail = [&](double y) {
    const double p = std::exp(y);
    return p / std::sqrt(2.0 * turning_W(tp, p * p));
  };
  constexpr double kPanel = 0.05;
  const double x_c = composite(h_top, 0.0, tc, kPanel);

  Profile1D prof;
  prof.phi_max = pm;
  prof.omega = omega;
  prof.lambda = lambda;
  const double X = 40.0 / std::sqrt(2.0 * omega);
  const double dx = X / (n_nodes - 1);
  std::vector<double> half(n_nodes);
  half[0] = pm;
  double x_cur = 0.0, t_cur = 0.0, y_cur = yc;
  bool in_tail = false;
  for (int j = 1; j < n_nodes; ++j) {
    const double xj = j * dx;
    if (!in_tail && xj > x_c) {
      in_tail = true;
      x_cur = x_c;
      y_cur = yc;
    }
    if (!in_tail) {
      double t = t_cur + (xj - x_cur) / h_top(t_cur);
      for (int it = 0; it < 50; ++it) {
        const double F = x_cur + composite(h_top, t_cur, t, kPanel) - xj;
        const double step = F / h_top(t);
        t -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, t)) break;
      }
      x_cur = x_cur + composite(h_top, t_cur, t, kPanel);
      x_cur = xj;
      t_cur = t;
      half[j] = pm - t * t;
    } else {
      double y = y_cur - (xj - x_cur) / h_tail(y_cur);
      for (int it = 0; it < 50; ++it) {
        const double F = x_cur + composite(h_tail, y, y_cur, kPanel) - xj;
        const double step = -F / h_tail(y);
        y -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(y))) break;
      }
      x_cur = xj;
      y_cur = y;
      half[j] = std::exp(y);
    }
  }
  prof.x_nodes.resize(2 * n_nodes - 1);
  prof.values.resize(2 * n_nodes - 1);
  for (int j = 0; j < n_nodes; ++j) {
    prof.x_nodes[n_nodes - 1 + j] = j * dx;
    prof.x_nodes[n_nodes - 1 - j] = -j * dx;
    prof.values[n_nodes - 1 + j] = half[j];
    prof.values[n_nodes - 1 - j] = half[j];
  }

  // Full-line integrals as 2∫₀^∞ q(φ(x)) dx, changed to the amplitude variables.
  ModelParams model{Family::QuinticLog1D, lambda, omega};
  auto line_integral = [&](auto q) {
    const double top = composite([&](double t) { return q(pm - t * t) * h_top(t); }, 0.0, tc, kPanel);
    const double tail = composite([&](double y) { return q(std::exp(y)) * h_tail(y); }, yc - 40.0, yc, kPanel);
    return 2.0 * (top + tail);
  };
  prof.mass = line_integral([](double p) { return p * p; });
  const double kinetic = line_integral([&](double p) { return turning_W(tp, p * p); });
  const double potential = line_integral([&](double p) { return energy_density(p * p, model); });
  prof.energy = kinetic + potential;
  prof.action = prof.energy + omega * prof.mass;
  return prof;
}

ConvexityScan action_convexity_scan(double lambda, const std::vector<double>& omegas) {
  ConvexityScan scan;
  auto action = [&](double w) { return ground_state_1d_quadrature(lambda, w, 2).action; };
  const double edge = window_edge(lambda);
  for (double w : omegas) {
    ConvexityRow row;
    row.omega = w;
    const DppValue d = dpp_quadrature(lambda, w);
    row.dpp_quad = d.value;
    row.dpp_general = d.general;
    row.dpp_simplified = d.simplified;
    const Profile1D p = ground_state_1d_quadrature(lambda, w, 2);
    row.mass = p.mass;
    row.action = p.action;
    auto second_difference = [&](double h) -> std::optional<double> {
      if (w - h <= 0.0 || w + h >= edge) return std::nullopt;
      return (action(w + h) - 2.0 * p.action + action(w - h)) / (h * h);
    };
    row.dpp_fd = second_difference(1e-4);
    row.dpp_fd_half = second_difference(5e-5);
    scan.rows.push_back(row);
  }
  scan.all_positive = !scan.rows.empty();
  scan.signs_agree = true;
  for (const auto& r : scan.rows) {
    if (!(r.dpp_quad > 0.0)) scan.all_positive = false;
    if (r.dpp_fd) {
      if ((*r.dpp_fd > 0.0) != (r.dpp_quad > 0.0)) scan.signs_agree = false;
      scan.max_fd_rel_error = std::max(scan.max_fd_rel_error, std::abs(*r.dpp_fd - r.dpp_quad) / std::abs(r.dpp_quad));
    }
  }
  scan.mass_increasing = true;
  for (std::size_t i = 1; i < scan.rows.size(); ++i) {
    if (scan.rows[i].omega > scan.rows[i - 1].omega && !(scan.rows[i].mass > scan.rows[i - 1].mass)) {
      scan.mass_increasing = false;
    }
  }
  return scan;
}

}  // namespace lognls
