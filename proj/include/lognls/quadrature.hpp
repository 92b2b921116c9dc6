#pragma once

#include <vector>

namespace lognls {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss–Legendre rule (Newton on the Legendre recurrence).
const GaussRule& gauss_legendre(int n);

/// ∫_a^b f by one n-point Gauss–Legendre panel.
template <class F>
double gauss_panel(F&& f, double a, double b, int n = 20) {
  const auto& rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return s * half;
}

}  // namespace lognls
