#include "diraclab/fields.hpp"

#include <limits>

namespace diraclab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
double bracket(double t) { return std::sqrt(1.0 + t * t); }
}  // namespace

double Envelope::value(double t) const {
  switch (kind) {
    case Kind::Const:
      return 1.0;
    case Kind::InvPow:
      return std::pow(1.0 + t * t, -0.5 * p);
    case Kind::Gauss: {
      const double u = t / p;
      return std::exp(-u * u);
    }
    case Kind::OddRamp:
      return t / bracket(t);
  }
  return 0.0;
}

double Envelope::dt(double t) const {
  switch (kind) {
    case Kind::Const:
      return 0.0;
    case Kind::InvPow:
      return -p * t * std::pow(1.0 + t * t, -0.5 * p - 1.0);
    case Kind::Gauss: {
      const double u = t / p;
      return -2.0 * u / p * std::exp(-u * u);
    }
    case Kind::OddRamp:
      return std::pow(1.0 + t * t, -1.5);
  }
  return 0.0;
}

double Envelope::limit(int side) const {
  switch (kind) {
    case Kind::Const:
      return 1.0;
    case Kind::InvPow:
    case Kind::Gauss:
      return 0.0;
    case Kind::OddRamp:
      return side > 0 ? 1.0 : -1.0;
  }
  return 0.0;
}

double Envelope::decay_rate() const {
  switch (kind) {
    case Kind::Const:
    case Kind::Gauss:
      return kInf;
    case Kind::InvPow:
      return p;
    case Kind::OddRamp:
      return 2.0;  // t/<t> -+ 1 = O(t^-2)
  }
  return kInf;
}

double FourierProfile::value(double x) const {
  double v = a0;
  const double w = 2.0 * M_PI / L;
  for (std::size_t n = 0; n < ac.size(); ++n) v += ac[n] * std::cos(w * (n + 1) * x);
  for (std::size_t n = 0; n < as.size(); ++n) v += as[n] * std::sin(w * (n + 1) * x);
  return v;
}

double FourierProfile::dx(double x) const {
  double v = 0.0;
  const double w = 2.0 * M_PI / L;
  for (std::size_t n = 0; n < ac.size(); ++n)
    v -= ac[n] * w * (n + 1) * std::sin(w * (n + 1) * x);
  for (std::size_t n = 0; n < as.size(); ++n)
    v += as[n] * w * (n + 1) * std::cos(w * (n + 1) * x);
  return v;
}

FourierProfile FourierProfile::scaled(double s) const {
  FourierProfile out = *this;
  out.a0 *= s;
  for (auto& c : out.ac) c *= s;
  for (auto& c : out.as) c *= s;
  return out;
}

double ScalarField::value(double t, double x) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.profile.value(x) * term.env.value(t);
  return v;
}

double ScalarField::dt(double t, double x) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.profile.value(x) * term.env.dt(t);
  return v;
}

double ScalarField::dx(double t, double x) const {
  double v = 0.0;
  for (const auto& term : terms) v += term.profile.dx(x) * term.env.value(t);
  return v;
}

FourierProfile ScalarField::limit_profile(int side) const {
  FourierProfile sum;
  if (!terms.empty()) sum.L = terms.front().profile.L;
  for (const auto& term : terms) {
    const double lim = term.env.limit(side);
    if (lim == 0.0) continue;
    FourierProfile p = term.profile.scaled(lim);
    sum.L = p.L;
    sum.a0 += p.a0;
    if (p.ac.size() > sum.ac.size()) sum.ac.resize(p.ac.size(), 0.0);
    if (p.as.size() > sum.as.size()) sum.as.resize(p.as.size(), 0.0);
    for (std::size_t n = 0; n < p.ac.size(); ++n) sum.ac[n] += p.ac[n];
    for (std::size_t n = 0; n < p.as.size(); ++n) sum.as[n] += p.as[n];
  }
  return sum;
}

bool ScalarField::time_independent() const {
  for (const auto& term : terms)
    if (term.env.kind != Envelope::Kind::Const) return false;
  return true;
}

ScalarField ScalarField::constant(double v, double L) {
  ScalarField f;
  FourierProfile p;
  p.L = L;
  p.a0 = v;
  f.terms.push_back({p, Envelope::constant()});
  return f;
}

Field2D Field2D::wrap(const ScalarField& s) {
  Field2D f;
  f.f = [s](double t, double x) { return s.value(t, x); };
  f.f_t = [s](double t, double x) { return s.dt(t, x); };
  f.f_x = [s](double t, double x) { return s.dx(t, x); };
  return f;
}

Field2D Field2D::constant(double v) {
  Field2D f;
  f.f = [v](double, double) { return v; };
  f.f_t = [](double, double) { return 0.0; };
  f.f_x = [](double, double) { return 0.0; };
  return f;
}

Profile1D Profile1D::wrap(const FourierProfile& p) {
  Profile1D out;
  out.f = [p](double x) { return p.value(x); };
  out.f_x = [p](double x) { return p.dx(x); };
  return out;
}

Profile1D Profile1D::constant(double v) {
  Profile1D out;
  out.f = [v](double) { return v; };
  out.f_x = [](double) { return 0.0; };
  return out;
}

}  // namespace diraclab
