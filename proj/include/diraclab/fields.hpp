#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "diraclab/errors.hpp"

namespace diraclab {

// Closed-form time envelopes with exact derivatives and t -> +-inf limits.
//   Const:   1
//   InvPow:  <t>^-p                (decays at rate p on both sides)
//   Gauss:   exp(-(t/tau)^2)       (faster than any power)
//   OddRamp: t/<t>                 (tends to +-1 at rate 2; odd in t)
struct Envelope {
  enum class Kind { Const, InvPow, Gauss, OddRamp };
  Kind kind = Kind::Const;
  double p = 1.0;  // InvPow exponent, or Gauss tau

  double value(double t) const;
  double dt(double t) const;
  double limit(int side) const;  // side = +1 (t->+inf) or -1 (t->-inf)
  double decay_rate() const;     // rate of value - limit; inf for Const/Gauss

  static Envelope constant() { return {Kind::Const, 0.0}; }
  static Envelope inv_pow(double p) { return {Kind::InvPow, p}; }
  static Envelope gauss(double tau) { return {Kind::Gauss, tau}; }
  static Envelope odd_ramp() { return {Kind::OddRamp, 0.0}; }
};

// Truncated Fourier series on the circle of circumference L.
struct FourierProfile {
  double L = 2.0 * M_PI;
  double a0 = 0.0;
  std::vector<double> ac, as;  // harmonics 1..n

  double value(double x) const;
  double dx(double x) const;
  FourierProfile scaled(double s) const;
};

// f(t,x) = sum_i profile_i(x) * envelope_i(t); smooth with analytic
// derivatives in both variables.
struct ScalarField {
  struct Term {
    FourierProfile profile;
    Envelope env;
  };
  std::vector<Term> terms;

  double value(double t, double x) const;
  double dt(double t, double x) const;
  double dx(double t, double x) const;
  FourierProfile limit_profile(int side) const;
  bool time_independent() const;

  static ScalarField constant(double v, double L);
};

// Type-erased scalar field on R x S^1; closed-form families wrap ScalarField,
// reduced families wrap flow compositions.
struct Field2D {
  std::function<double(double, double)> f;
  std::function<double(double, double)> f_t;
  std::function<double(double, double)> f_x;

  double operator()(double t, double x) const { return f(t, x); }
  static Field2D wrap(const ScalarField& s);
  static Field2D constant(double v);
};

struct Profile1D {
  std::function<double(double)> f;
  std::function<double(double)> f_x;
  static Profile1D wrap(const FourierProfile& p);
  static Profile1D constant(double v);
};

}  // namespace diraclab
