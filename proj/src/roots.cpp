#include "lognls/roots.hpp"

#include <algorithm>

#include "lognls/errors.hpp"

namespace lognls {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_width) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw Error(ErrorCode::BracketFailure, "bisect: no sign change on bracket");
  }
  for (int it = 0; it < 4000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_width * std::max(std::abs(lo), std::abs(hi))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double newton_polish(const std::function<double(double)>& f,
                     const std::function<double(double)>& df, double x,
                     double lo, double hi) {
  const double fx = f(x);
  const double d = df(x);
  if (d == 0.0 || !std::isfinite(d)) return x;
  const double next = x - fx / d;
  if (!(next >= lo && next <= hi)) return x;
  return std::abs(f(next)) <= std::abs(fx) ? next : x;
}

}  // namespace lognls
