#include "diraclab/adiabatic.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "diraclab/linalg.hpp"

namespace diraclab {

namespace {

double quintic_step(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

// Smooth retargeting of eigenvalues: identity for |l| >= delta, pushed to
// +- delta/2 inside, sign-preserving (zero goes up by convention).
double retarget(double l, double delta) {
  const double a = std::abs(l);
  if (a >= delta) return l;
  const double sgn = (l >= 0.0) ? 1.0 : -1.0;
  const double rho = quintic_step((a - 0.5 * delta) / (0.5 * delta));
  return rho * l + (1.0 - rho) * sgn * 0.5 * delta;
}

Mat matrix_exp_checked(const Mat& A, const char* where) {
  Mat E = A.exp();
  if (!E.allFinite()) throw ExpSeriesError(std::string("matrix exponential failed in ") + where);
  return E;
}

}  // namespace

GapModification gap_modification(const HamiltonianBuilder& builder,
                                 const std::vector<double>& t_probe, int rank_budget) {
  GapModification mod;
  const Mat& G = builder.gram();

  const EigDecomposition eig_out =
      eig_decompose({builder.asymptotic(Side::Out), G, "H_out"});
  const EigDecomposition eig_in = eig_decompose({builder.asymptotic(Side::In), G, "H_in"});
  mod.delta_inf = std::min(spectral_gap(eig_out), spectral_gap(eig_in));
  if (mod.delta_inf <= 0.0)
    throw ModificationFailure("asymptotic Hamiltonians are not gapped; nothing to restore");

  const double delta = mod.delta_inf;
  Mat prev_proj;
  for (double t : t_probe) {
    const EigDecomposition eig = eig_decompose({builder(t), G, "H(t)"});
    int rank = 0;
    for (int i = 0; i < eig.values.size(); ++i) {
      const double a = std::abs(eig.values[i]);
      if (a < 0.02 * delta)
        throw ModificationFailure(
            "eigenvalue at zero near t = " + std::to_string(t) +
            ": spectral flow through the gap admits no sign-preserving modification");
      if (a < delta) ++rank;
    }
    mod.max_rank = std::max(mod.max_rank, rank);
    if (rank > 0) mod.active = true;

    // a jump of the instantaneous projection between probes signals branch
    // reassignment (a crossing the |lambda| scan slipped past)
    Mat proj = spectral_function(eig, G, [](double l) { return l > 0 ? 1.0 : 0.0; });
    if (prev_proj.size() > 0 && (proj - prev_proj).norm() > 1.2)
      throw ModificationFailure("projection branch jump between probes near t = " +
                                std::to_string(t));
    prev_proj = std::move(proj);
  }
  if (mod.max_rank > rank_budget)
    throw ModificationFailure("gap modification needs rank " + std::to_string(mod.max_rank) +
                              " beyond the budget " + std::to_string(rank_budget));

  auto shared = std::make_shared<HamiltonianBuilder>(builder);
  mod.R = [shared, delta](double t) {
    const Mat H = (*shared)(t);
    const Mat& Gm = shared->gram();
    const EigDecomposition eig = eig_decompose({H, Gm, "H(t)"});
    Mat R = Mat::Zero(H.rows(), H.cols());
    for (int i = 0; i < eig.values.size(); ++i) {
      const double shift = retarget(eig.values[i], delta) - eig.values[i];
      if (shift != 0.0)
        R += shift * eig.vectors.col(i) * (eig.vectors.col(i).adjoint() * Gm);
    }
    return R;
  };
  return mod;
}

AdiabaticMachine::AdiabaticMachine(const MetricFamily& family, const CliffordRep& rep,
                                   const GridSpec& grid, int rank_budget)
    : builder_(family, rep, grid), rank_budget_(rank_budget) {
  // probe the window where the built-in families can lose their gap; a dip
  // narrower than the probe spacing surfaces later as GapViolation
  std::vector<double> probe;
  for (double t = -10.0; t <= 10.0 + 1e-9; t += 1.0) probe.push_back(t);
  probe.insert(probe.end(), {-20.0, -15.0, 15.0, 20.0});
  mod_ = gap_modification(builder_, probe, rank_budget_);
  gap_floor_ = 0.45 * mod_.delta_inf;
}

Mat AdiabaticMachine::hamiltonian_raw(double t) const { return builder_(t); }

Mat AdiabaticMachine::hamiltonian(double t) {
  if (!mod_.active) return builder_(t);
  const EigDecomposition& e = eig(t);
  return spectral_function(e, gram(), [](double l) { return l; });
}

const EigDecomposition& AdiabaticMachine::eig(double t) {
  auto it = eig_cache_.find(t);
  if (it != eig_cache_.end()) return it->second;
  EigDecomposition e = eig_decompose({builder_(t), gram(), "H(t)"});
  // gap modification shares the eigenbasis: only the eigenvalues move
  if (mod_.active)
    for (int i = 0; i < e.values.size(); ++i)
      e.values[i] = retarget(e.values[i], mod_.delta_inf);
  if (eig_cache_.size() > 120) eig_cache_.clear();
  return eig_cache_.emplace(t, std::move(e)).first->second;
}

Mat AdiabaticMachine::projection(double t, SpectralSide side) {
  auto& cache = (side == SpectralSide::Plus) ? pp_cache_ : pm_cache_;
  auto it = cache.find(t);
  if (it != cache.end()) return it->second;
  Mat P = spectral_projection(eig(t), gram(), side, gap_floor_);
  if (cache.size() > 240) cache.clear();
  return cache.emplace(t, std::move(P)).first->second;
}

Mat AdiabaticMachine::dt_projection_plus(double t) {
  auto it = dtp_cache_.find(t);
  if (it != dtp_cache_.end()) return it->second;
  const double eta = dt_stencil(t);
  Mat d = (-projection(t + 2 * eta, SpectralSide::Plus) +
           8.0 * projection(t + eta, SpectralSide::Plus) -
           8.0 * projection(t - eta, SpectralSide::Plus) +
           projection(t - 2 * eta, SpectralSide::Plus)) /
          (12.0 * eta);
  if (dtp_cache_.size() > 120) dtp_cache_.clear();
  return dtp_cache_.emplace(t, std::move(d)).first->second;
}

Mat AdiabaticMachine::epsilon(double t) {
  auto it = eps_cache_.find(t);
  if (it != eps_cache_.end()) return it->second;
  Mat e = spectral_function(eig(t), gram(), [](double l) { return std::sqrt(l * l + 1.0); });
  if (eps_cache_.size() > 64) eps_cache_.clear();
  return eps_cache_.emplace(t, std::move(e)).first->second;
}

Mat AdiabaticMachine::sandwich(const Mat& S, double t) {
  const Mat Pp = projection(t, SpectralSide::Plus);
  const Mat Pm = projection(t, SpectralSide::Minus);
  const Mat Z = Pp * S * Pm;
  return Z + gram_adjoint(Z, gram());
}

AdiabaticMachine::Correction AdiabaticMachine::first_correction(double t,
                                                                CorrectionMode mode) {
  Correction c;
  c.S = S_level(t, 1, mode);
  c.R = sandwich(c.S, t);
  return c;
}

Mat AdiabaticMachine::S_level(double t, int order, CorrectionMode mode) {
  if (order <= 0) return Mat::Zero(gram().rows(), gram().cols());
  auto& cache = s_cache_[mode == CorrectionMode::PaperLeading ? 0 : 1];
  const auto key = std::make_pair(t, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const Mat Pp = projection(t, SpectralSide::Plus);
  const Mat Pm = projection(t, SpectralSide::Minus);

  auto solve_offdiag = [&](const Mat& defect) -> Mat {
    if (mode == CorrectionMode::PaperLeading) {
      const Mat inv2eps =
          spectral_function(eig(t), gram(), [](double l) { return 0.5 / std::sqrt(l * l + 1.0); });
      return -(inv2eps * defect);
    }
    // exact Sylvester solve in the eigenbasis: H+ X - X H- = -defect
    const EigDecomposition& e = eig(t);
    const Mat D = e.vectors.adjoint() * gram() * defect * e.vectors;
    Mat X = Mat::Zero(D.rows(), D.cols());
    for (int a = 0; a < e.values.size(); ++a) {
      if (e.values[a] <= 0) continue;
      for (int b = 0; b < e.values.size(); ++b) {
        if (e.values[b] >= 0) continue;
        const double den = e.values[a] - e.values[b];
        if (std::abs(den) < 1e-12) throw DegeneracyError("Sylvester denominator collapsed");
        X(a, b) = -D(a, b) / den;
      }
    }
    return e.vectors * X * e.vectors.adjoint() * gram();
  };

  Mat S;
  if (order == 1) {
    S = solve_offdiag(Pp * dt_projection_plus(t) * Pm);
  } else {
    const Mat S_prev = S_level(t, order - 1, mode);
    auto R_prev = [this, order, mode](double s) {
      return sandwich(S_level(s, order - 1, mode), s);
    };
    const Mat Ht = dressed_hamiltonian_with(t, R_prev);
    const cplx iu(0.0, 1.0);
    const Mat D = dt_projection_plus(t) + (Pp * (iu * Ht) - (iu * Ht) * Pp);
    const Mat defect = Pp * D * Pm;
    S = S_prev + solve_offdiag(defect);
  }
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, std::move(S)).first->second;
}

Mat AdiabaticMachine::dressing(double t, int order, CorrectionMode mode) {
  if (order <= 0) return Mat::Zero(gram().rows(), gram().cols());
  return sandwich(S_level(t, order, mode), t);
}

Mat AdiabaticMachine::dressed_hamiltonian_with(double t,
                                               const std::function<Mat(double)>& R_of_t) {
  const cplx iu(0.0, 1.0);
  const double eta = dt_stencil(t);
  const Mat E = matrix_exp_checked(iu * R_of_t(t), "dressed_hamiltonian");
  const Mat Em = matrix_exp_checked(-iu * R_of_t(t), "dressed_hamiltonian");
  const Mat dE = (-matrix_exp_checked(iu * R_of_t(t + 2 * eta), "stencil") +
                  8.0 * matrix_exp_checked(iu * R_of_t(t + eta), "stencil") -
                  8.0 * matrix_exp_checked(iu * R_of_t(t - eta), "stencil") +
                  matrix_exp_checked(iu * R_of_t(t - 2 * eta), "stencil")) /
                 (12.0 * eta);
  return E * hamiltonian(t) * Em - iu * (dE * Em);
}

Mat AdiabaticMachine::dressed_hamiltonian(double t, int order, CorrectionMode mode) {
  if (order <= 0) return hamiltonian(t);
  auto R = [this, order, mode](double s) { return dressing(s, order, mode); };
  return dressed_hamiltonian_with(t, R);
}

Mat AdiabaticMachine::exp_iR(double t, int order, CorrectionMode mode) {
  return matrix_exp_checked(cplx(0, 1) * dressing(t, order, mode), "exp_iR");
}

Mat AdiabaticMachine::integrand_matrix(double t, bool corrected, int order,
                                       CorrectionMode mode) {
  const cplx iu(0.0, 1.0);
  const Mat Pp = projection(t, SpectralSide::Plus);
  const Mat Ht = corrected ? dressed_hamiltonian(t, order, mode) : hamiltonian(t);
  return dt_projection_plus(t) + (Pp * (iu * Ht) - (iu * Ht) * Pp);
}

AdiabaticMachine::Integrand AdiabaticMachine::cook_integrand(double t, bool corrected,
                                                             int order,
                                                             CorrectionMode mode) {
  Integrand out;
  out.D = integrand_matrix(t, corrected, order, mode);
  out.gram_norm = gram_operator_norm(out.D, gram());
  const int n_min = std::max(2, builder_.grid().M / 16);
  out.freq = annulus_block_slopes(out.D, builder_.fourier(), n_min);
  return out;
}

Mat AdiabaticMachine::corrected_projection(double t, SpectralSide side, int order,
                                           CorrectionMode mode) {
  if (order <= 0) return projection(t, side);
  const Mat R = dressing(t, order, mode);
  const cplx iu(0.0, 1.0);
  const Mat E = matrix_exp_checked(iu * R, "corrected_projection");
  const Mat Em = matrix_exp_checked(-iu * R, "corrected_projection");
  return Em * projection(t, side) * E;
}

Mat AdiabaticMachine::cook_flow_integrand(double t, SpectralSide side, int order,
                                          CorrectionMode mode) {
  const cplx iu(0.0, 1.0);
  Mat D = integrand_matrix(t, /*corrected=*/order > 0, order, mode);
  if (side == SpectralSide::Minus) D = -D;
  if (order > 0) {
    const Mat R = dressing(t, order, mode);
    const Mat E = matrix_exp_checked(iu * R, "cook_flow");
    const Mat Em = matrix_exp_checked(-iu * R, "cook_flow");
    D = Em * D * E;
  }
  if (mod_.active) {
    // the true generator lacks the gap modification: subtract its commutator
    const Mat Pt = corrected_projection(t, side, order, mode);
    const Mat Rm = hamiltonian(t) - hamiltonian_raw(t);
    D -= (Pt * (iu * Rm) - (iu * Rm) * Pt);
  }
  return D;
}

}  // namespace diraclab
