#include "diraclab/ode.hpp"

#include <cmath>
#include <vector>

namespace diraclab {

namespace {
// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

using State = std::vector<double>;

State axpy(const State& y, std::initializer_list<std::pair<double, const State*>> terms,
           double h) {
  State out = y;
  for (const auto& [coef, k] : terms)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * coef * (*k)[i];
  return out;
}
}  // namespace

OdeResult integrate_ode(const std::function<State(double, const State&)>& f, State y,
                        double t0, double t1, double tol) {
  OdeResult res;
  if (t0 == t1) {
    res.y = y;
    return res;
  }
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::min(0.1, std::abs(t1 - t0));
  State k1 = f(t, y);
  const int max_steps = 2000000;
  while (dir * (t1 - t) > 0) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    const State k2 = f(t + c2 * h, axpy(y, {{a21, &k1}}, h));
    const State k3 = f(t + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const State k4 = f(t + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State k5 =
        f(t + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State k6 = f(
        t + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State y5 =
        axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State k7 = f(t + h, y5);

    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                            e6 * k6[i] + e7 * k7[i]);
      err += e * e;
      const double s = std::max(std::abs(y[i]), std::abs(y5[i])) + 1e-30;
      scale += s * s;
    }
    err = std::sqrt(err) / (tol * (std::sqrt(scale) + 1.0));

    if (err <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
      if (++res.steps > max_steps)
        throw FlowIntegrationFailure("ODE step budget exhausted");
    }
    const double factor = std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    h *= factor;
    if (std::abs(h) < 1e-14 * (std::abs(t) + 1.0))
      throw FlowIntegrationFailure("ODE step size underflow");
  }
  res.y = y;
  return res;
}

}  // namespace diraclab
