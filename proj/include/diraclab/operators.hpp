#pragma once

#include <memory>
#include <string>

#include "diraclab/spin_algebra.hpp"

namespace diraclab {

// Dense operator together with the Hermitian positive Gram matrix defining
// its adjoint: <f,g> = f^dag G g.
struct DiscreteOperator {
  Mat matrix;
  Mat gram;
  std::string label;
};

// Gram matrix of the canonical Hilbertian product: (i beta gamma0) tensor
// diag(h0(x_j)^{1/2} L/M). With the fixed beta normalisation the spinor
// factor is the identity.
Mat gram_nu0(const MetricFamily& family, const CliffordRep& rep, const GridSpec& grid);

// Builder for the reduced Hamiltonian on the spectral grid. Precomputes the
// derivative matrix once; assemble(t) is then cheap enough to sit inside the
// propagation loop. The family must be reduced (c == 1, b == 0).
class HamiltonianBuilder {
 public:
  HamiltonianBuilder(const MetricFamily& family, const CliffordRep& rep,
                     const GridSpec& grid);

  Mat operator()(double t) const;        // H(t)
  Mat asymptotic(Side side) const;       // H_{+-inf}
  const Mat& gram() const { return gram_; }
  const GridSpec& grid() const { return grid_; }
  const Fourier& fourier() const { return *fourier_; }
  const MetricFamily& family() const { return family_; }
  const CliffordRep& rep() const { return rep_; }

 private:
  Mat assemble(const RVec& h, const RVec& m) const;

  MetricFamily family_;
  CliffordRep rep_;
  GridSpec grid_;
  std::shared_ptr<const Fourier> fourier_;
  RVec x_, h0_;
  Mat gram_;
};

// H(t) as a DiscreteOperator; raises AssemblyError if the nu0-selfadjointness
// residual exceeds tol (the discrete construction is exact up to roundoff,
// so a large residual means broken inputs). If the raw residual is above tol
// the assembly is symmetrised once before failing.
DiscreteOperator assemble_H(const MetricFamily& family, const CliffordRep& rep,
                            const GridSpec& grid, double t, double tol = 1e-8);

// Asymptotic Hamiltonian H_{+-inf}; raises HypothesisViolation when the
// spectral gap is below gap_floor (massive hypothesis).
DiscreteOperator assemble_H_asymptotic(const MetricFamily& family, const CliffordRep& rep,
                                       const GridSpec& grid, Side side,
                                       double gap_floor = 0.0);

struct MassiveReport {
  double gap;               // min |spec(H_side)|
  double sufficient_value;  // inf over nodes of c^2 m^2 - (d(cm))^2 / h
};

// Numerical gap and the analytic sufficient-condition infimum for the static
// asymptotic data on the given side.
MassiveReport check_massive(const MetricFamily& family, const CliffordRep& rep,
                            const GridSpec& grid, Side side);

}  // namespace diraclab
