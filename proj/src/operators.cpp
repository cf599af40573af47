#include "diraclab/operators.hpp"

#include "diraclab/funcalc.hpp"
#include "diraclab/linalg.hpp"

namespace diraclab {

Mat gram_nu0(const MetricFamily& family, const CliffordRep& rep, const GridSpec& grid) {
  grid.validate();
  const int M = grid.M;
  const double wq = grid.L / M;  // trapezoid weight, exact for periodic data
  const Mat2 spinor = rep.i_beta_gamma0();
  Mat G = Mat::Zero(2 * M, 2 * M);
  for (int j = 0; j < M; ++j) {
    const double rho = std::sqrt(family.spatial(0.0, grid.node(j))) * wq;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) G(a * M + j, b * M + j) = spinor(a, b) * rho;
  }
  return G;
}

HamiltonianBuilder::HamiltonianBuilder(const MetricFamily& family, const CliffordRep& rep,
                                       const GridSpec& grid)
    : family_(family), rep_(rep), grid_(grid), fourier_(std::make_shared<Fourier>(grid)) {
  if (!family.reduced())
    throw ReductionOrderViolation("Hamiltonian assembly requires a reduced family");
  x_ = grid.nodes();
  h0_.resize(grid.M);
  for (int j = 0; j < grid.M; ++j) h0_[j] = family.spatial(0.0, x_[j]);
  gram_ = gram_nu0(family, rep, grid);
}

// H = W^{-1} [ i g0 g1 (x) diag(h^-1/2) Dx + i g0 (x) diag(m) ] W with
// W = diag((h_t/h_0)^{-1/4}); the spin-connection term and the density
// correction cancel exactly, leaving the similarity by W. Gram-selfadjoint
// up to roundoff by construction.
Mat HamiltonianBuilder::assemble(const RVec& h, const RVec& m) const {
  const int M = grid_.M;
  const cplx iu(0.0, 1.0);

  RVec w(M), u(M);
  for (int j = 0; j < M; ++j) {
    w[j] = std::pow(h[j] / h0_[j], -0.25);
    u[j] = 1.0 / std::sqrt(h[j]);
  }

  Mat deriv = u.cast<cplx>().asDiagonal() * fourier_->derivative;
  // similarity by the diagonal density weight: X -> W^{-1} X W
  for (int r = 0; r < M; ++r)
    for (int c = 0; c < M; ++c) deriv(r, c) *= w[c] / w[r];

  Mat H = Mat::Zero(2 * M, 2 * M);
  const Mat2 A = iu * rep_.gamma01;  // derivative coefficient
  const Mat2 B = iu * rep_.gamma0;   // mass coefficient
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      if (A(a, b) != cplx(0, 0)) H.block(a * M, b * M, M, M) += A(a, b) * deriv;
      if (B(a, b) != cplx(0, 0))
        H.block(a * M, b * M, M, M) += B(a, b) * m.cast<cplx>().asDiagonal().toDenseMatrix();
    }
  return H;
}

Mat HamiltonianBuilder::operator()(double t) const {
  const int M = grid_.M;
  RVec h(M), m(M);
  for (int j = 0; j < M; ++j) {
    h[j] = family_.spatial(t, x_[j]);
    m[j] = family_.mass(t, x_[j]);
    if (h[j] <= 0.0) throw InvalidMetric("nonpositive h during assembly");
  }
  return assemble(h, m);
}

Mat HamiltonianBuilder::asymptotic(Side side) const {
  const int M = grid_.M;
  const Profile1D& hp = family_.spatial_profile(side);
  const Profile1D& mp = family_.mass_profile(side);
  RVec h(M), m(M);
  for (int j = 0; j < M; ++j) {
    h[j] = hp.f(x_[j]);
    m[j] = mp.f(x_[j]);
    if (h[j] <= 0.0) throw InvalidMetric("nonpositive asymptotic h");
  }
  return assemble(h, m);
}

DiscreteOperator assemble_H(const MetricFamily& family, const CliffordRep& rep,
                            const GridSpec& grid, double t, double tol) {
  HamiltonianBuilder builder(family, rep, grid);
  DiscreteOperator op{builder(t), builder.gram(),
                      family.name + ":H(" + std::to_string(t) + ")"};
  double res = gram_selfadjoint_residual(op.matrix, op.gram);
  if (res > tol) {
    // symmetrise once; the raw construction should already be exact
    op.matrix = 0.5 * (op.matrix + gram_adjoint(op.matrix, op.gram));
    res = gram_selfadjoint_residual(op.matrix, op.gram);
    if (res > tol)
      throw AssemblyError("nu0-selfadjointness residual " + std::to_string(res) +
                          " exceeds tolerance");
  }
  return op;
}

DiscreteOperator assemble_H_asymptotic(const MetricFamily& family, const CliffordRep& rep,
                                       const GridSpec& grid, Side side, double gap_floor) {
  HamiltonianBuilder builder(family, rep, grid);
  DiscreteOperator op{builder.asymptotic(side), builder.gram(),
                      family.name + ":H_" + side_name(side)};
  if (gap_floor > 0.0) {
    const EigDecomposition eig = eig_decompose(op);
    if (spectral_gap(eig) < gap_floor)
      throw HypothesisViolation("asymptotic Hamiltonian (" + std::string(side_name(side)) +
                                ") gap below the massive threshold");
  }
  return op;
}

MassiveReport check_massive(const MetricFamily& family, const CliffordRep& rep,
                            const GridSpec& grid, Side side) {
  // reduce on the fly so the caller may pass unreduced data
  const MetricFamily reduced =
      family.reduced() ? family : conformal_reduce(shift_flow_reduce(family, grid));

  DiscreteOperator op = assemble_H_asymptotic(reduced, rep, grid, side);
  const EigDecomposition eig = eig_decompose(op);

  // sufficient condition on the *original* static data:
  // inf over nodes of c^2 m^2 - d(cm) h^{-1} d(cm)
  const Profile1D& cp = family.lapse_profile(side);
  const Profile1D& mp = family.mass_profile(side);
  const Profile1D& hp = family.spatial_profile(side);
  double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.M; ++j) {
    const double x = grid.node(j);
    const double cm = cp.f(x) * mp.f(x);
    const double dcm = cp.f_x(x) * mp.f(x) + cp.f(x) * mp.f_x(x);
    inf = std::min(inf, cm * cm - dcm * dcm / hp.f(x));
  }
  return {spectral_gap(eig), inf};
}

}  // namespace diraclab
