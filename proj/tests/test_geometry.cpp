#include <doctest.h>

#include <random>

#include "diraclab/fits.hpp"
#include "diraclab/geometry.hpp"

using namespace diraclab;

namespace {
const double L = 2.0 * M_PI;

std::vector<double> decade(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, double(i) / (n - 1)));
  return out;
}

GridSpec small_grid() {
  GridSpec g;
  g.M = 32;
  g.t_max = 160;
  return g;
}

const DecayReport::Entry& entry(const DecayReport& r, const std::string& field, int k) {
  for (const auto& e : r.entries)
    if (e.field == field && e.derivative == k) return e;
  throw std::runtime_error("missing entry");
}

// minimal fixed-step RK4, independent of the library integrator
double rk4_flow(const std::function<double(double, double)>& b, double y, double t1,
                int steps) {
  double x = y, t = 0.0;
  const double h = t1 / steps;
  for (int i = 0; i < steps; ++i) {
    const double k1 = b(t, x);
    const double k2 = b(t + h / 2, x + h / 2 * k1);
    const double k3 = b(t + h / 2, x + h / 2 * k2);
    const double k4 = b(t + h, x + h * k3);
    x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return x;
}
}  // namespace

TEST_CASE("catalog families are positive and carry the declared structure") {
  for (const char* name : {"flat", "bump", "ramp", "shifted", "massdip"}) {
    const MetricFamily fam = make_family(name, {}, L);
    for (double t : {-7.0, -1.0, 0.0, 0.4, 3.0, 50.0})
      for (double x : {0.0, 1.0, 2.5, 5.0}) {
        CHECK(fam.spatial(t, x) > 0.0);
        CHECK(fam.lapse(t, x) > 0.0);
      }
  }
  CHECK(make_family("flat", {}, L).time_independent);
  CHECK(!make_family("bump", {}, L).time_independent);
  CHECK(!make_family("shifted", {}, L).shift_is_zero);
  CHECK_THROWS_AS(make_family("nonsense", {}, L), ConfigError);
}

TEST_CASE("verify_decay recovers the declared exponents") {
  const GridSpec grid = small_grid();
  const auto samples = decade(2.0, 100.0, 12);

  // h = 1 + 0.3 cos(x) <t>^{-3/2}: fitted exponent 1.5 +- 0.1
  const MetricFamily bump =
      make_family("bump", {{"mu", 1.5}, {"asymmetry", 0.0}, {"mass_amplitude", 0.0}}, L);
  const DecayReport rep = verify_decay(bump, grid, samples, Side::Out);
  CHECK(entry(rep, "h", 0).fitted == doctest::Approx(1.5).epsilon(0.07));
  CHECK(entry(rep, "h", 1).fitted == doctest::Approx(2.5).epsilon(0.07));
  CHECK(rep.all_compliant());

  // exactly static: difference identically zero, reported exact
  const DecayReport flat_rep =
      verify_decay(make_family("flat", {}, L), grid, samples, Side::In);
  CHECK(entry(flat_rep, "h", 0).exact);
  CHECK(std::isinf(entry(flat_rep, "h", 0).fitted));
  CHECK(flat_rep.all_compliant());

  // shift field b = 0.1 sin(x) <t>^{-5/2} checked against 1 + mu
  const MetricFamily shifted = make_family("shifted", {{"mu", 1.5}}, L);
  const DecayReport srep = verify_decay(shifted, grid, samples, Side::Out);
  CHECK(entry(srep, "b", 0).fitted == doctest::Approx(2.5).epsilon(0.05));
  CHECK(entry(srep, "b", 0).required == doctest::Approx(2.5));
  CHECK(srep.all_compliant());
}

TEST_CASE("verify_decay rejects bad sampling and bad metrics") {
  const GridSpec grid = small_grid();
  const MetricFamily bump = make_family("bump", {}, L);
  CHECK_THROWS_AS(verify_decay(bump, grid, {1.0, 2.0, 3.0}, Side::Out), InsufficientData);
  CHECK_THROWS_AS(verify_decay(bump, grid, {2.0, 3.0, 4.0, 5.0}, Side::Out),
                  InsufficientData);  // less than a decade

  MetricFamily sick = make_family("flat", {}, L);
  sick.spatial = Field2D::constant(-1.0);
  CHECK_THROWS_AS(verify_decay(sick, grid, decade(2, 50, 8), Side::Out), InvalidMetric);
}

TEST_CASE("conformal reduction") {
  // constant lapse c = 2: h -> 1/4, m -> 2
  ScalarField c2 = ScalarField::constant(2.0, L);
  ScalarField one = ScalarField::constant(1.0, L);
  ScalarField zero = ScalarField::constant(0.0, L);
  const MetricFamily fam = make_custom_family(c2, zero, one, one, 1.5, L, "c2");
  const MetricFamily red = conformal_reduce(fam);
  CHECK(red.lapse_is_one);
  CHECK(red.spatial(0.3, 1.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(red.mass(0.3, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(red.spatial_out.f(0.7) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(red.mass_in.f(0.7) == doctest::Approx(2.0).epsilon(1e-14));

  // identity conformal factor: family passes through unchanged
  const MetricFamily flat = make_family("flat", {}, L);
  const MetricFamily same = conformal_reduce(flat);
  CHECK(same.spatial(1.0, 2.0) == flat.spatial(1.0, 2.0));

  // c(x) = 1 + sin(x)/2 at x = pi/2: h~ = 4/9, m~ = 3/2
  ScalarField chalf = ScalarField::constant(1.0, L);
  chalf.terms.push_back({FourierProfile{L, 0.0, {}, {0.5}}, Envelope::constant()});
  const MetricFamily fam2 = make_custom_family(chalf, zero, one, one, 1.5, L, "csin");
  const MetricFamily red2 = conformal_reduce(fam2);
  CHECK(red2.spatial(0.0, M_PI / 2) == doctest::Approx(4.0 / 9.0).epsilon(1e-13));
  CHECK(red2.mass(0.0, M_PI / 2) == doctest::Approx(1.5).epsilon(1e-13));

  // reduction order: b must be gone first
  CHECK_THROWS_AS(conformal_reduce(make_family("shifted", {}, L)), ReductionOrderViolation);
}

TEST_CASE("shift-flow reduction") {
  const GridSpec grid = small_grid();
  ScalarField one = ScalarField::constant(1.0, L);

  // b == 0 passes through
  const MetricFamily flat = make_family("flat", {}, L);
  CHECK(shift_flow_reduce(flat, grid).shift_is_zero);

  // x-independent shift is a rigid rotation: the flat metric survives
  ScalarField bconst;
  bconst.terms.push_back({FourierProfile{L, 0.1, {}, {}}, Envelope::inv_pow(2.5)});
  const MetricFamily rot = make_custom_family(one, bconst, one, one, 1.5, L, "rot");
  const MetricFamily rot_red = shift_flow_reduce(rot, grid);
  CHECK(rot_red.shift_is_zero);
  CHECK(rot_red.spatial(1.7, 0.3) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rot_red.spatial(-3.0, 2.0) == doctest::Approx(1.0).epsilon(1e-10));

  // b = 0.1 sin(x) exp(-t^2), h == 1: pulled-back h against a reference flow
  ScalarField bsin;
  bsin.terms.push_back({FourierProfile{L, 0.0, {}, {0.1}}, Envelope::gauss(1.0)});
  const MetricFamily fam = make_custom_family(one, bsin, one, one, 1.5, L, "bsin");
  const MetricFamily red = shift_flow_reduce(fam, grid);

  auto bfun = [](double t, double x) { return 0.1 * std::sin(x) * std::exp(-t * t); };
  const double y = 0.0, t1 = 1.0, dy = 1e-6;
  const double x_hi = rk4_flow(bfun, y + dy, t1, 20000);
  const double x_lo = rk4_flow(bfun, y - dy, t1, 20000);
  const double J_ref = (x_hi - x_lo) / (2 * dy);
  CHECK(red.spatial(t1, y) == doctest::Approx(J_ref * J_ref).epsilon(1e-8));

  // the lapse pulls back by composition
  const MetricFamily shifted = make_family("shifted", {}, L);
  const MetricFamily sred = shift_flow_reduce(shifted, grid);
  CHECK(sred.shift_is_zero);
  CHECK(!sred.lapse_is_one);
}

TEST_CASE("time-sector Christoffel symbols") {
  // h = e^{2t}: Gamma^1_{01} = 1 at every (t, x)
  MetricFamily exp_fam = make_family("flat", {}, L);
  exp_fam.spatial.f = [](double t, double) { return std::exp(2 * t); };
  exp_fam.spatial.f_t = [](double t, double) { return 2 * std::exp(2 * t); };
  exp_fam.spatial.f_x = [](double, double) { return 0.0; };
  exp_fam.time_independent = false;
  const ChristoffelTime g = christoffel_time(exp_fam, 0.0, 1.0);
  CHECK(g.gamma_101 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(g.gamma_011 == doctest::Approx(1.0).epsilon(1e-14));

  // dt h = 0 at the extremum of a gaussian dip
  MetricFamily dip = make_family("flat", {}, L);
  dip.spatial.f = [](double t, double) { return 1.0 + 0.1 * std::exp(-t * t); };
  dip.spatial.f_t = [](double t, double) { return -0.2 * t * std::exp(-t * t); };
  dip.time_independent = false;
  CHECK(christoffel_time(dip, 0.0, 0.5).gamma_101 == doctest::Approx(0.0));

  // static metric: both symbols vanish
  const ChristoffelTime s = christoffel_time(make_family("flat", {}, L), 1.0, 2.0);
  CHECK(s.gamma_101 == 0.0);
  CHECK(s.gamma_011 == 0.0);

  // agrees with centered differences of h at random points
  const MetricFamily bump = make_family("bump", {}, L);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(-3.0, 3.0), ux(0.0, L);
  for (int i = 0; i < 10; ++i) {
    const double t = ut(rng), x = ux(rng), dt = 1e-5;
    const double fd = (bump.spatial(t + dt, x) - bump.spatial(t - dt, x)) / (2 * dt);
    CHECK(christoffel_time(bump, t, x).gamma_011 ==
          doctest::Approx(0.5 * fd).epsilon(1e-8));
  }

  CHECK_THROWS_AS(christoffel_time(make_family("shifted", {}, L), 0.0, 0.0),
                  ReductionOrderViolation);
}

TEST_CASE("reductions preserve the decay class") {
  const GridSpec grid = small_grid();
  const MetricFamily shifted = make_family("shifted", {{"mu", 1.5}}, L);
  const MetricFamily red = conformal_reduce(shift_flow_reduce(shifted, grid));
  CHECK(red.reduced());
  const DecayReport rep = verify_decay(red, grid, decade(2.0, 50.0, 8), Side::Out);
  CHECK(rep.all_compliant());
}
