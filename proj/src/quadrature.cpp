#include "diraclab/quadrature.hpp"

#include <cmath>

namespace diraclab {

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on Legendre polynomials, nodes symmetric about 0.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = x;
    rule.nodes[n - 1 - i] = -x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = mid - half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

QuadRule tanh_sinh(int n, double a, double b) {
  QuadRule rule;
  const double umax = 3.8;  // tanh((pi/2) sinh 3.8) is 1 to double precision
  const double du = 2.0 * umax / (n - 1);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    const double u = -umax + i * du;
    const double s = 0.5 * M_PI * std::sinh(u);
    const double x = std::tanh(s);
    const double ch = std::cosh(s);
    const double w = du * 0.5 * M_PI * std::cosh(u) / (ch * ch);
    if (w < 1e-300) continue;
    rule.nodes.push_back(mid + half * x);
    rule.weights.push_back(half * w);
  }
  return rule;
}

}  // namespace diraclab
