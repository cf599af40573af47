#pragma once

#include <vector>

namespace diraclab {

struct QuadRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre rule on [a, b].
QuadRule gauss_legendre(int n, double a, double b);

// tanh-sinh (double exponential) rule on the open interval (a, b).
QuadRule tanh_sinh(int n, double a, double b);

}  // namespace diraclab
