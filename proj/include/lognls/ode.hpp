#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "lognls/errors.hpp"

namespace lognls {

/// Embedded Dormand–Prince 5(4) pair with FSAL and the Hairer–Wanner
/// fourth-order continuous extension.
template <std::size_t N>
class DormandPrince {
 public:
  using State = std::array<double, N>;

  struct Tolerances {
    double rtol = 1e-12;
    double atol = 1e-14;
  };

  /// One accepted step, with dense output on [t0, t1].
  struct Step {
    double t0 = 0.0;
    double t1 = 0.0;
    State y0{};
    State y1{};
    std::array<State, 5> cont{};

    State at(double t) const {
      const double h = t1 - t0;
      const double s = h == 0.0 ? 0.0 : (t - t0) / h;
      const double s1 = 1.0 - s;
      State out{};
      for (std::size_t i = 0; i < N; ++i) {
        out[i] = cont[0][i] +
                 s * (cont[1][i] + s1 * (cont[2][i] + s * (cont[3][i] + s1 * cont[4][i])));
      }
      return out;
    }
  };

  explicit DormandPrince(Tolerances tol = {}) : tol_(tol) {}

  /// Integrates from (t0, y0) towards t_end. `on_step(step)` is called after
  /// every accepted step and returns false to stop. Returns the final time.
  template <class Rhs, class OnStep>
  double integrate(Rhs&& rhs, double t0, State y0, double t_end, double h0, OnStep&& on_step) const {
    double t = t0;
    State y = y0;
    State k1 = rhs(t, y);
    double h = std::min(h0, t_end - t0);
    const double h_min = 1e-14 * std::max(1.0, std::abs(t_end));
    Step step;
    while (t < t_end) {
      if (t + h > t_end) h = t_end - t;
      State k2, k3, k4, k5, k6, k7, ytmp, ynew;
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a21 * k1[i]);
      k2 = rhs(t + c2 * h, ytmp);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
      k3 = rhs(t + c3 * h, ytmp);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      k4 = rhs(t + c4 * h, ytmp);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      k5 = rhs(t + c5 * h, ytmp);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      k6 = rhs(t + h, ytmp);
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      k7 = rhs(t + h, ynew);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = tol_.atol + tol_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / N);
      if (!std::isfinite(err)) err = 1e10;

      if (err <= 1.0) {
        step.t0 = t;
        step.t1 = t + h;
        step.y0 = y;
        step.y1 = ynew;
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = ynew[i] - y[i];
          const double bspl = h * k1[i] - dy;
          step.cont[0][i] = y[i];
          step.cont[1][i] = dy;
          step.cont[2][i] = bspl;
          step.cont[3][i] = dy - h * k7[i] - bspl;
          step.cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        t = step.t1;
        y = ynew;
        k1 = k7;
        if (!on_step(static_cast<const Step&>(step))) return t;
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= fac;
      } else {
        h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
        if (h < h_min) throw Error(ErrorCode::IntegratorFailure, "step size underflow");
      }
    }
    return t;
  }

 private:
  Tolerances tol_;

  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

}  // namespace lognls
