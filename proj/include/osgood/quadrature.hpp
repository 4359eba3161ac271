#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace osgood::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule by Newton iteration on P_n (Golub-Welsch is overkill here).
inline Rule gauss_legendre(int n) {
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

inline const Rule& gl16() {
  static const Rule rule = gauss_legendre(16);
  return rule;
}

/// Integral of f over [a, b] with the 16-point rule.
template <class F>
double integrate(F&& f, double a, double b) {
  const Rule& r = gl16();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

/// Composite rule on `panels` equal pieces of [a, b].
template <class F>
double integrate_composite(F&& f, double a, double b, int panels) {
  double s = 0.0;
  const double w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) s += integrate(f, a + k * w, a + (k + 1) * w);
  return s;
}

}  // namespace osgood::quad
