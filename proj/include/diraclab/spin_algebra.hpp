#pragma once

#include "diraclab/geometry.hpp"
#include "diraclab/grid.hpp"

namespace diraclab {

// Fixed 2x2 representation of the Clifford algebra for signature (-,+):
//   (gamma0)^2 = -1, (gamma1)^2 = +1, {gamma0, gamma1} = 0,
//   gamma_a^dag beta = -beta gamma_a,  i beta gamma0 > 0.
// beta is normalised so that i beta gamma0 = Id, which turns the canonical
// Hilbertian product into a plain weighted l^2 product.
struct CliffordRep {
  Mat2 gamma0, gamma1, beta;
  Mat2 gamma01;  // gamma0 * gamma1

  Mat2 i_beta_gamma0() const { return (cplx(0, 1) * beta * gamma0); }
};

CliffordRep make_clifford();

// Test fixture: one entry of gamma1 carries the wrong sign, breaking
// (gamma1)^2 = +1. Used by the verify suite's mutation check.
CliffordRep make_clifford_broken_gamma1();

struct CliffordResiduals {
  double square_g0;      // ||g0^2 + 1||
  double square_g1;      // ||g1^2 - 1||
  double anticommute;    // ||{g0,g1}||
  double beta_adjoint;   // max_a ||g_a^dag beta + beta g_a||
  double beta_hermitian; // ||beta - beta^dag||
  double positivity;     // min eig of i beta gamma0 (should be > 0)
  double max() const;
};

CliffordResiduals clifford_residuals(const CliffordRep& rep);

// Component u^1 of the frame e_1 = u^1 d/dx obtained by parallel transport
// along d/dt from u^1(0,x) = h(0,x)^{-1/2}, solved as an ODE in t. In d = 1
// the closed form is h(t,x)^{-1/2}; the ODE route is kept as the primary
// path and the closed form as its oracle.
double frame_transport(const MetricFamily& family, double t, double x,
                       double ode_tol = 1e-12);

// Spatial spin-connection coefficient sigma_1 in the transported frame, so
// that the spinor derivative along e_1 is u^1 d/dx + sigma_1. For
// g = -dt^2 + h dx^2 this is (dt h / h) gamma0 gamma1 / 4; it vanishes for
// static metrics and satisfies beta sigma_1 + sigma_1^dag beta = 0.
Mat2 spin_connection_x(const MetricFamily& family, const CliffordRep& rep,
                       double t, double x);

// Diagonal density operator implementing the spinor identification between
// the time-s and time-t surfaces: multiplication by w(t,x)/w(s,x) with
// w = h_t^{-1/4} h_0^{1/4}; the frame bookkeeping itself is the identity in
// transported frames. Acts per component (returns the M x M diagonal).
RVec transport_operator(const MetricFamily& family, const GridSpec& grid,
                        double t, double s);

}  // namespace diraclab
