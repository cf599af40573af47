#include "diraclab/spin_algebra.hpp"

#include <Eigen/Eigenvalues>

#include "diraclab/ode.hpp"

namespace diraclab {

CliffordRep make_clifford() {
  CliffordRep rep;
  rep.gamma0 << 0, 1, -1, 0;
  rep.gamma1 << 0, 1, 1, 0;
  // beta = i gamma0 is the unique normalisation with i beta gamma0 = Id
  rep.beta = cplx(0, 1) * rep.gamma0;
  rep.gamma01 = rep.gamma0 * rep.gamma1;
  return rep;
}

CliffordRep make_clifford_broken_gamma1() {
  CliffordRep rep = make_clifford();
  rep.gamma1(0, 1) = -1.0;  // breaks (gamma1)^2 = +1
  rep.gamma01 = rep.gamma0 * rep.gamma1;
  return rep;
}

double CliffordResiduals::max() const {
  double m = std::max({square_g0, square_g1, anticommute, beta_adjoint, beta_hermitian});
  if (positivity <= 0) m = std::max(m, 1.0);
  return m;
}

CliffordResiduals clifford_residuals(const CliffordRep& rep) {
  CliffordResiduals r;
  const Mat2 id = Mat2::Identity();
  r.square_g0 = (rep.gamma0 * rep.gamma0 + id).norm();
  r.square_g1 = (rep.gamma1 * rep.gamma1 - id).norm();
  r.anticommute = (rep.gamma0 * rep.gamma1 + rep.gamma1 * rep.gamma0).norm();
  r.beta_adjoint =
      std::max((rep.gamma0.adjoint() * rep.beta + rep.beta * rep.gamma0).norm(),
               (rep.gamma1.adjoint() * rep.beta + rep.beta * rep.gamma1).norm());
  r.beta_hermitian = (rep.beta - rep.beta.adjoint()).norm();
  Eigen::SelfAdjointEigenSolver<Mat2> es(rep.i_beta_gamma0());
  r.positivity = es.eigenvalues().minCoeff();
  return r;
}

double frame_transport(const MetricFamily& family, double t, double x, double ode_tol) {
  if (!family.reduced())
    throw ReductionOrderViolation("frame_transport requires a reduced family");
  // dt u + Gamma^1_{01} u = 0 from u(0) = h(0,x)^{-1/2}
  auto rhs = [&family, x](double s, const std::vector<double>& u) {
    const double h = family.spatial(s, x);
    const double g = 0.5 * family.spatial.f_t(s, x) / h;
    return std::vector<double>{-g * u[0]};
  };
  const double u0 = 1.0 / std::sqrt(family.spatial(0.0, x));
  std::vector<double> y;
  try {
    y = integrate_ode(rhs, {u0}, 0.0, t, ode_tol).y;
  } catch (const FlowIntegrationFailure& e) {
    throw TransportFailure(e.what());
  }
  const double u = y[0];
  const double h = family.spatial(t, x);
  if (std::abs(h * u * u - 1.0) > 1e4 * ode_tol + 1e-10)
    throw TransportFailure("transported frame lost orthonormality");
  return u;
}

Mat2 spin_connection_x(const MetricFamily& family, const CliffordRep& rep, double t,
                       double x) {
  if (!family.reduced())
    throw ReductionOrderViolation("spin_connection_x requires a reduced family");
  const double h = family.spatial(t, x);
  const double ht = family.spatial.f_t(t, x);
  return 0.25 * (ht / h) * rep.gamma01;
}

RVec transport_operator(const MetricFamily& family, const GridSpec& grid, double t,
                        double s) {
  RVec w(grid.M);
  for (int j = 0; j < grid.M; ++j) {
    const double x = grid.node(j);
    w[j] = std::pow(family.spatial(t, x), -0.25) * std::pow(family.spatial(s, x), 0.25);
  }
  return w;
}

}  // namespace diraclab
