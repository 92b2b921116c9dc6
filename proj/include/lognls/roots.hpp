#pragma once

#include <cmath>
#include <functional>

namespace lognls {

/// Bisection on a bracket with f(lo), f(hi) of opposite sign, run until the
/// bracket width is below rel_width·max(|lo|,|hi|) or the midpoint stops
/// moving. Returns the midpoint of the final bracket.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_width = 1e-15);

/// One Newton correction, accepted only if it stays inside [lo, hi] and
/// does not increase |f|.
double newton_polish(const std::function<double(double)>& f,
                     const std::function<double(double)>& df, double x,
                     double lo, double hi);

}  // namespace lognls
