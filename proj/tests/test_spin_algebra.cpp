#include <doctest.h>

#include <random>

#include "diraclab/linalg.hpp"
#include "diraclab/spin_algebra.hpp"

using namespace diraclab;

namespace {
const double L = 2.0 * M_PI;
}

TEST_CASE("Clifford representation invariants hold to machine precision") {
  const CliffordRep rep = make_clifford();
  const CliffordResiduals r = clifford_residuals(rep);
  CHECK(r.square_g0 <= 1e-14);
  CHECK(r.square_g1 <= 1e-14);
  CHECK(r.anticommute <= 1e-14);
  CHECK(r.beta_adjoint <= 1e-14);
  CHECK(r.beta_hermitian <= 1e-14);
  CHECK(r.positivity > 0.0);
  // with the fixed normalisation i beta gamma0 = Id the smallest eigenvalue is 1
  CHECK(r.positivity == doctest::Approx(1.0).epsilon(1e-14));
  // deterministic across calls
  CHECK((make_clifford().gamma1 - rep.gamma1).norm() == 0.0);
}

TEST_CASE("broken-gamma1 fixture fails the algebra") {
  const CliffordResiduals r = clifford_residuals(make_clifford_broken_gamma1());
  CHECK(r.square_g1 > 0.1);
}

TEST_CASE("frame transport matches the closed form h^{-1/2}") {
  const MetricFamily flat = make_family("flat", {}, L);
  CHECK(frame_transport(flat, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));

  // constant metric h = 4: u^1 = 1/2
  ScalarField four = ScalarField::constant(4.0, L);
  ScalarField one = ScalarField::constant(1.0, L);
  ScalarField zero = ScalarField::constant(0.0, L);
  const MetricFamily fam4 = make_custom_family(one, zero, four, one, 1.5, L, "h4");
  CHECK(frame_transport(fam4, 0.7, 0.1) == doctest::Approx(0.5).epsilon(1e-12));

  const MetricFamily bump = make_family("bump", {{"mu", 1.5}}, L);
  CHECK(frame_transport(bump, 2.0, 0.0) ==
        doctest::Approx(1.0 / std::sqrt(bump.spatial(2.0, 0.0))).epsilon(1e-10));

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ut(-8.0, 8.0), ux(0.0, L);
  for (int i = 0; i < 20; ++i) {
    const double t = ut(rng), x = ux(rng);
    CHECK(frame_transport(bump, t, x) ==
          doctest::Approx(1.0 / std::sqrt(bump.spatial(t, x))).epsilon(1e-9));
  }

  CHECK_THROWS_AS(frame_transport(make_family("shifted", {}, L), 1.0, 0.0),
                  ReductionOrderViolation);
}

TEST_CASE("spatial spin connection") {
  const CliffordRep rep = make_clifford();

  // t-independent metric: vanishes identically
  const MetricFamily flat = make_family("flat", {}, L);
  CHECK(spin_connection_x(flat, rep, 1.3, 0.4).norm() == 0.0);

  // metric-compatibility: e1(psi^dag beta psi) = (D psi)^dag beta psi + psi^dag beta D psi
  // with D = u d/dx + sigma_1; for trig-polynomial spinors the residual is
  // the beta-antisymmetry defect of sigma_1, which vanishes by construction.
  const MetricFamily bump = make_family("bump", {{"mu", 1.5}}, L);
  auto psi = [](double x) {
    Eigen::Vector2cd v;
    v << std::exp(cplx(0, x)), 2.0 * std::exp(cplx(0, -2 * x));
    return v;
  };
  auto dpsi = [](double x) {
    Eigen::Vector2cd v;
    v << cplx(0, 1) * std::exp(cplx(0, x)), cplx(0, -4) * std::exp(cplx(0, -2 * x));
    return v;
  };
  const double t = 0.8;
  for (double x : {0.0, 0.9, 2.2, 4.4}) {
    const double u = frame_transport(bump, t, x);
    const Mat2 sigma = spin_connection_x(bump, rep, t, x);
    const Eigen::Vector2cd p = psi(x);
    const Eigen::Vector2cd Dp = u * dpsi(x) + sigma * p;
    // d/dx (psi^dag beta psi) scaled by u
    const double eta = 1e-6;
    const auto form = [&](double xx) {
      return (psi(xx).adjoint() * rep.beta * psi(xx))(0, 0);
    };
    const cplx lhs = u * (form(x + eta) - form(x - eta)) / (2 * eta);
    const cplx rhs = (Dp.adjoint() * rep.beta * p)(0, 0) + (p.adjoint() * rep.beta * Dp)(0, 0);
    CHECK(std::abs(lhs - rhs) <= 1e-7);

    // algebraic compatibility contract, exact
    CHECK((rep.beta * sigma + sigma.adjoint() * rep.beta).norm() <= 1e-15);
  }
}

TEST_CASE("transport operator: density bookkeeping") {
  GridSpec grid;
  grid.M = 16;
  const MetricFamily bump = make_family("bump", {{"mu", 1.5}}, L);

  // t = s: identity
  const RVec w_same = transport_operator(bump, grid, 1.2, 1.2);
  CHECK((w_same.array() - 1.0).abs().maxCoeff() <= 1e-15);

  // h = e^{2t}: w(t)/w(0) = e^{-t/2}
  MetricFamily exp_fam = make_family("flat", {}, L);
  exp_fam.spatial.f = [](double t, double) { return std::exp(2 * t); };
  exp_fam.spatial.f_t = [](double t, double) { return 2 * std::exp(2 * t); };
  exp_fam.time_independent = false;
  const RVec w_exp = transport_operator(exp_fam, grid, 1.0, 0.0);
  CHECK(w_exp[3] == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));

  // cocycle w(t,s) w(s,r) = w(t,r)
  const RVec a = transport_operator(bump, grid, 2.0, 0.7);
  const RVec b = transport_operator(bump, grid, 0.7, -1.3);
  const RVec c = transport_operator(bump, grid, 2.0, -1.3);
  CHECK((a.cwiseProduct(b) - c).cwiseAbs().maxCoeff() <= 1e-12);

  // the canonical product is preserved: nu_t(T f, T g) = nu_s(f, g); with
  // i beta gamma0 = Id this is w^2 h_t^{1/2} = h_s^{1/2} pointwise
  std::mt19937_64 rng(3);
  const RVec w = transport_operator(bump, grid, 1.7, 0.2);
  double worst = 0.0;
  for (int j = 0; j < grid.M; ++j) {
    const double x = grid.node(j);
    const double lhs = w[j] * w[j] * std::sqrt(bump.spatial(1.7, x));
    const double rhs = std::sqrt(bump.spatial(0.2, x));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-12);
}
