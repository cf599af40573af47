#pragma once

#include "diraclab/adiabatic.hpp"
#include "diraclab/evolution.hpp"

namespace diraclab {

struct MollerOptions {
  std::vector<double> schedule;  // positive magnitudes; empty = 10*2^j up to window
  double variance_gate = 0.3;    // fitted-exponent stability gate for Richardson
  int norm_iterations = 20;
  std::uint64_t seed = 0x5eed;
};

struct ScatteringResult {
  Mat c_plus, c_minus;
  Mat gram;
  Side direction = Side::Out;
  std::vector<double> schedule;   // signed times actually used
  std::vector<double> residuals;  // ||A_{j+1} - A_j|| in the Gram operator norm
  double mu_hat = std::numeric_limits<double>::infinity();
  double mu_hat_stderr = 0.0;
  bool exact = false;  // sequence constant to drift precision (static families)
  double tail_bound = 0.0;
  std::string extrapolation;  // "exact" | "richardson" | "largest-T"
  std::string lift_status = "reduced-frame";
  std::string method = "moller";

  double idempotency_residual = 0.0;
  double completeness_residual = 0.0;
  double selfadjoint_residual = 0.0;
};

std::vector<double> default_schedule(double T0, double factor, double T_max);

// c^{+-}_{out/in} = lim U(0,T) 1_{R+-}(H_{+-inf}) U(T,0), with the fitted
// convergence exponent, Richardson extrapolation under a single-power tail
// model, and a conservative tail bound. When the pairwise exponent estimates
// are unstable (variance above the gate) or the extrapolated combination
// degrades the projection identities that every sequence element satisfies
// exactly, the largest-T element is returned instead. Throws NoConvergence
// when the residual sequence does not decay.
ScatteringResult moller_projection(const HamiltonianBuilder& builder, Propagator& prop,
                                   Side direction, const MollerOptions& opt = {});

struct CookOptions {
  double T_max = 0.0;  // 0: propagator window
  int order = 1;
  CorrectionMode mode = CorrectionMode::SylvesterExact;
};

// P~+-(0) plus the integrated Cook correction
//   int_0^{+-T} U(0,t) (d/dt)[U-conjugated corrected projection] U(t,0) dt.
// The integral is a total derivative and is evaluated through its
// antiderivative, so the only truncation error is the integral tail, bounded
// by the fitted O(t^{-1-mu}) integrand decay. Converges one order faster in
// T than the raw Moller sequence.
ScatteringResult cook_accelerated_limit(AdiabaticMachine& machine, Propagator& prop,
                                        Side direction, const CookOptions& opt = {});

// Conformal lift back to the physical Dirac operator: c -> c0^{-1/2} c c0^{1/2},
// Gram -> Gram * diag(c0) (n = 2). Projection identities are preserved.
ScatteringResult lift_to_physical(const ScatteringResult& reduced, const RVec& c0_nodes,
                                  int n = 2);

// Measure the projection-identity residuals of a candidate pair in place.
void measure_projection_identities(ScatteringResult& r);

}  // namespace diraclab
