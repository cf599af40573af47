#include "diraclab/states.hpp"

#include <Eigen/Eigenvalues>

#include "diraclab/linalg.hpp"

namespace diraclab {

namespace {

// i gamma(n) as an endomorphism of the spinor factor, extended over the grid
Mat i_gamma_n(const CliffordRep& rep, int M) {
  Mat out = Mat::Zero(2 * M, 2 * M);
  const Mat2 g = cplx(0, 1) * rep.gamma0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      if (g(a, b) != cplx(0, 0))
        out.block(a * M, b * M, M, M) = g(a, b) * Mat::Identity(M, M);
  return out;
}

double min_eig_of_form(const Mat& form) {
  const Mat h = 0.5 * (form + Mat(form.adjoint()));
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  return es.eigenvalues().minCoeff();
}

}  // namespace

StateCovariances cauchy_covariances(const Mat& c_plus, const Mat& c_minus, const Mat& gram,
                                    std::string provenance) {
  StateCovariances st;
  st.c_plus = c_plus;
  st.c_minus = c_minus;
  st.gram = gram;
  st.provenance = std::move(provenance);

  const Mat form_p = gram * c_plus;
  const Mat form_m = gram * c_minus;
  const double scale = std::max({form_p.operatorNorm(), form_m.operatorNorm(), 1e-30});
  st.positivity_min_plus = min_eig_of_form(form_p);
  st.positivity_min_minus = min_eig_of_form(form_m);
  st.sum_rule_residual = (form_p + form_m - gram).operatorNorm() / gram.operatorNorm();

  if (st.positivity_min_plus < -1e-8 * scale || st.positivity_min_minus < -1e-8 * scale)
    throw PositivityViolation("covariance form has a negative eigenvalue: min(l+) = " +
                              std::to_string(st.positivity_min_plus) + ", min(l-) = " +
                              std::to_string(st.positivity_min_minus));
  return st;
}

StateCovariances static_vacuum(const MetricFamily& family, const CliffordRep& rep,
                               const GridSpec& grid) {
  if (!family.time_independent)
    throw ReductionOrderViolation("static_vacuum needs a t-independent family");
  const DiscreteOperator H = assemble_H(family, rep, grid, 0.0);
  const EigDecomposition eig = eig_decompose(H);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  if (spectral_gap(eig) < 1e-12 * scale)
    throw KernelObstruction("static Hamiltonian has (numerical) zero modes");
  const Mat cp = spectral_projection(eig, H.gram, SpectralSide::Plus, 0.0);
  const Mat cm = spectral_projection(eig, H.gram, SpectralSide::Minus, 0.0);
  return cauchy_covariances(cp, cm, H.gram, "vacuum");
}

Mat two_point_kernel(const StateCovariances& state, const CliffordRep& rep,
                     Propagator& prop, SpectralSide side, double t, double s) {
  const int M = static_cast<int>(state.gram.rows()) / 2;
  const Mat& c = (side == SpectralSide::Plus) ? state.c_plus : state.c_minus;
  return prop.matrix(t, 0.0) * i_gamma_n(rep, M) * c * prop.matrix(0.0, s);
}

double two_point_sum_rule_residual(const StateCovariances& state, const CliffordRep& rep,
                                   Propagator& prop, double t, double s) {
  const int M = static_cast<int>(state.gram.rows()) / 2;
  const Mat lhs = two_point_kernel(state, rep, prop, SpectralSide::Plus, t, s) +
                  two_point_kernel(state, rep, prop, SpectralSide::Minus, t, s);
  const Mat rhs = prop.matrix(t, 0.0) * i_gamma_n(rep, M) * prop.matrix(0.0, s);
  return (lhs - rhs).operatorNorm() / rhs.operatorNorm();
}

double two_point_equation_residual(const StateCovariances& state, const CliffordRep& rep,
                                   Propagator& prop, const HamiltonianBuilder& builder,
                                   SpectralSide side, double t, double s) {
  const double eta = 1e-4 * std::sqrt(1.0 + t * t);
  auto K = [&](double tt) { return two_point_kernel(state, rep, prop, side, tt, s); };
  const Mat dK = (-K(t + 2 * eta) + 8.0 * K(t + eta) - 8.0 * K(t - eta) + K(t - 2 * eta)) /
                 (12.0 * eta);
  const Mat Kt = K(t);
  const Mat resid = dK - cplx(0, 1) * builder(t) * Kt;
  return resid.operatorNorm() / std::max(Kt.operatorNorm(), 1e-30);
}

double time_consistency_residual(const Mat& c_at_s, const Mat& c_at_t, const Mat& gram,
                                 Propagator& prop, double t, double s) {
  const Mat Ust = prop.matrix(s, t);
  const Mat lhs = Ust.adjoint() * (gram * c_at_s) * Ust;
  const Mat rhs = gram * c_at_t;
  return (lhs - rhs).operatorNorm() / std::max(rhs.operatorNorm(), 1e-30);
}

SymbolReport hadamard_symbol_test(const StateCovariances& state, const CliffordRep& rep,
                                  const MetricFamily& family, const GridSpec& grid,
                                  int n_min, double fail_gate) {
  const Fourier fourier(grid);
  const int M = grid.M;
  const int n_max = M / 4;

  // 1_{R+-} of the principal symbol -g0 g1 h^{-1/2} k: independent of h,
  // only the sign of k enters.
  auto symbol_projection = [&](double k, SpectralSide side) -> Mat2 {
    const double sgn = (side == SpectralSide::Plus) ? 1.0 : -1.0;
    return 0.5 * (Mat2::Identity() - sgn * ((k >= 0) ? 1.0 : -1.0) * rep.gamma01);
  };

  SymbolReport report;
  const Mat cf = fourier.to_fourier(state.c_plus);
  for (int j = 0; j < M; ++j) {
    const int n = grid.mode_index(j);
    if (std::abs(n) < n_min || std::abs(n) > n_max) continue;
    const Mat2 dev = fourier.spinor_block(cf, j) - symbol_projection(fourier.k[j], SpectralSide::Plus);
    report.kabs.push_back(std::abs(n));
    report.deviation.push_back(dev.operatorNorm());
  }
  report.fit = fit_power_law(report.kabs, report.deviation);
  report.exact = report.fit.exact;

  // windowed symbol at 4 fixed x slices: Gaussian window, plain l2 pairing
  const RVec x = grid.nodes();
  for (int slice = 0; slice < 4; ++slice) {
    const double x0 = grid.L * slice / 4.0;
    const double sigma = grid.L / 8.0;
    std::vector<double> ks, devs;
    for (int j = 0; j < M; ++j) {
      const int n = grid.mode_index(j);
      if (std::abs(n) < n_min || std::abs(n) > n_max) continue;
      Vec wexp(M);
      for (int jj = 0; jj < M; ++jj) {
        const double d = std::remainder(x[jj] - x0, grid.L);
        wexp[jj] = std::exp(-0.5 * d * d / (sigma * sigma)) *
                   std::exp(cplx(0, fourier.k[j] * x[jj]));
      }
      const double norm2 = wexp.squaredNorm();
      Mat2 blk;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          cplx acc = 0.0;
          for (int r = 0; r < M; ++r) {
            cplx row = 0.0;
            for (int cidx = 0; cidx < M; ++cidx)
              row += state.c_plus(a * M + r, b * M + cidx) * wexp[cidx];
            acc += std::conj(wexp[r]) * row;
          }
          blk(a, b) = acc / norm2;
        }
      const Mat2 dev = blk - symbol_projection(fourier.k[j], SpectralSide::Plus);
      ks.push_back(std::abs(n));
      devs.push_back(dev.operatorNorm());
    }
    report.slices.push_back(fit_power_law(ks, devs));
  }

  if (!report.exact && report.fit.slope > fail_gate)
    throw HadamardDiagnosticFailure("symbol-test slope " + std::to_string(report.fit.slope) +
                                    " above the failure gate " + std::to_string(fail_gate));
  return report;
}

AnnulusReport smoothing_difference_test(const StateCovariances& state,
                                        const Mat& corrected_plus, const GridSpec& grid,
                                        int n_min) {
  const Fourier fourier(grid);
  return annulus_block_slopes(state.c_plus - corrected_plus, fourier, n_min);
}

double conformal_covariance_residual(const StateCovariances& reduced_state,
                                     const CliffordRep& rep, Propagator& prop,
                                     const MetricFamily& unreduced, const GridSpec& grid,
                                     SpectralSide side, double t, double s, int n) {
  const int M = grid.M;
  const RVec x = grid.nodes();
  RVec ct(M), cs(M), c0(M);
  for (int j = 0; j < M; ++j) {
    ct[j] = unreduced.lapse(t, x[j]);
    cs[j] = unreduced.lapse(s, x[j]);
    c0[j] = unreduced.lapse(0.0, x[j]);
  }

  // reduced-frame kernel, computed directly
  const Mat lhs = two_point_kernel(reduced_state, rep, prop, side, t, s);

  // physical-frame kernel from the lifted propagator, lifted projections and
  // the physical slice volume c_s, then mapped back by the covariance rule
  const Mat Ut0_phys = conformal_lift(prop.matrix(t, 0.0), ct, c0, n);
  const Mat U0s_phys = conformal_lift(prop.matrix(0.0, s), c0, cs, n);
  const Mat& c_red = (side == SpectralSide::Plus) ? reduced_state.c_plus
                                                  : reduced_state.c_minus;
  Mat c_phys = c_red;
  const double p = 0.5 * (n - 1);
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < M; ++j) {
      c_phys.row(a * M + j) *= std::pow(c0[j], -p);
      c_phys.col(a * M + j) *= std::pow(c0[j], p);
    }
  Mat phys = Ut0_phys * i_gamma_n(rep, M) * c_phys * U0s_phys;
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < M; ++j) phys.col(a * M + j) *= cs[j];  // slice volume

  Mat rhs = phys;
  const double q_t = 0.5 * (n - 1), q_s = 0.5 * (n + 1);
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < M; ++j) {
      rhs.row(a * M + j) *= std::pow(ct[j], q_t);
      rhs.col(a * M + j) *= std::pow(cs[j], -q_s);
    }
  return (lhs - rhs).operatorNorm() / std::max(lhs.operatorNorm(), 1e-30);
}

}  // namespace diraclab
