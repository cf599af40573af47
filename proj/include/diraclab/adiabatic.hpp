#pragma once

#include <functional>
#include <map>
#include <memory>

#include "diraclab/fits.hpp"
#include "diraclab/funcalc.hpp"

namespace diraclab {

enum class CorrectionMode { PaperLeading, SylvesterExact };

// Finite-rank selfadjoint modification R_{-inf}(t) restoring the spectral
// gap of H(t) at intermediate times. Eigenvalues inside (-delta, delta) are
// smoothly retargeted to |lambda| >= delta/2; the modification vanishes
// identically wherever the spectrum already clears (-delta, delta), so it is
// compactly supported in t for families that are asymptotically gapped.
struct GapModification {
  bool active = false;
  double delta_inf = 0.0;
  int max_rank = 0;
  std::function<Mat(double)> R;
};

// Shared machinery for the corrected-projection construction: instantaneous
// spectral data of the (gap-modified) Hamiltonian, time derivatives of
// projections by high-order differencing, the order-N dressing R_N(t), the
// dressed Hamiltonian and the Cook integrand. All evaluators are cached per
// quantized t.
class AdiabaticMachine {
 public:
  AdiabaticMachine(const MetricFamily& family, const CliffordRep& rep,
                   const GridSpec& grid, int rank_budget = 8);

  const Mat& gram() const { return builder_.gram(); }
  const HamiltonianBuilder& builder() const { return builder_; }
  const GapModification& modification() const { return mod_; }
  double delta_inf() const { return mod_.delta_inf; }

  Mat hamiltonian_raw(double t) const;  // H(t)
  Mat hamiltonian(double t);            // H(t) + R_{-inf}(t)
  const EigDecomposition& eig(double t);
  Mat projection(double t, SpectralSide side);
  Mat dt_projection_plus(double t);  // 4th-order central differences
  Mat epsilon(double t);             // (H^2+1)^{1/2} of the modified H

  struct Correction {
    Mat S;  // off-diagonal generator block
    Mat R;  // P+ S P- + (P+ S P-)^*  (Gram-selfadjoint dressing)
  };
  // Leading dressing: S = -(2 eps)^{-1} dtP+ projected off-diagonal, or the
  // exact Sylvester solve in the eigenbasis annihilating the off-diagonal
  // commutator defect at this order.
  Correction first_correction(double t, CorrectionMode mode);

  // Order-N dressing R_N(t): N = 0 vanishes, N = 1 equals the leading
  // correction, each further order feeds the residual defect back through
  // the (2 eps)^{-1} (or exact Sylvester) solve.
  Mat dressing(double t, int order, CorrectionMode mode = CorrectionMode::PaperLeading);

  // e^{iR} H e^{-iR} + (1/i) (dt e^{iR}) e^{-iR} with R = R_N.
  Mat dressed_hamiltonian(double t, int order, CorrectionMode mode);
  Mat dressed_hamiltonian_with(double t, const std::function<Mat(double)>& R_of_t);

  struct Integrand {
    Mat D;            // dtP+ + [P+, i H~]   (H~ = H when uncorrected)
    double gram_norm;
    AnnulusReport freq;
  };
  Integrand cook_integrand(double t, bool corrected, int order = 1,
                           CorrectionMode mode = CorrectionMode::SylvesterExact);
  // the bare integrand matrix, no diagnostics
  Mat integrand_matrix(double t, bool corrected, int order, CorrectionMode mode);

  // P~+-(t) = e^{-iR} P+- e^{iR}.
  Mat corrected_projection(double t, SpectralSide side, int order,
                           CorrectionMode mode = CorrectionMode::SylvesterExact);

  // Integrand of d/dt [ U(0,t) P~+-(t) U(t,0) ] for the true (unmodified)
  // evolution; includes the gap-modification commutator when active.
  Mat cook_flow_integrand(double t, SpectralSide side, int order,
                          CorrectionMode mode = CorrectionMode::SylvesterExact);

  double dt_stencil(double t) const { return 1e-3 * std::sqrt(1.0 + t * t); }

 private:
  Mat S_level(double t, int order, CorrectionMode mode);
  Mat sandwich(const Mat& S, double t);  // T(S) = P+ S P- + adjoint
  Mat exp_iR(double t, int order, CorrectionMode mode);

  HamiltonianBuilder builder_;
  GapModification mod_;
  int rank_budget_;
  double gap_floor_;
  std::map<double, EigDecomposition> eig_cache_;
  std::map<double, Mat> pp_cache_, pm_cache_, dtp_cache_, eps_cache_;
  std::map<std::pair<double, int>, Mat> s_cache_[2];  // per correction mode
};

// Probes H(t) over t_probe and builds the gap modification; raises
// ModificationFailure when more than rank_budget eigenvalues need moving.
GapModification gap_modification(const HamiltonianBuilder& builder,
                                 const std::vector<double>& t_probe,
                                 int rank_budget = 8);

}  // namespace diraclab
