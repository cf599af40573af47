#pragma once

#include <functional>

#include "diraclab/errors.hpp"

namespace diraclab {

// Adaptive Dormand-Prince 5(4) for small real systems (the flow and
// transport ODEs are 1- or 2-dimensional). Integrates y' = f(t,y) from t0 to
// t1 with relative/absolute tolerance tol; throws FlowIntegrationFailure if
// the step size underflows.
struct OdeResult {
  std::vector<double> y;
  int steps = 0;
};

OdeResult integrate_ode(const std::function<std::vector<double>(double, const std::vector<double>&)>& f,
                        std::vector<double> y0, double t0, double t1, double tol);

}  // namespace diraclab
