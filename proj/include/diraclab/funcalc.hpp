#pragma once

#include <functional>

#include "diraclab/operators.hpp"

namespace diraclab {

// Generalized eigendecomposition of a Gram-selfadjoint operator, reduced to
// a standard Hermitian problem by Cholesky congruence of the Gram matrix.
// Columns of `vectors` are G-orthonormal; H = V diag(values) V^dag G.
struct EigDecomposition {
  Eigen::VectorXd values;  // ascending
  Mat vectors;
};

EigDecomposition eig_decompose(const DiscreteOperator& op, double adjoint_tol = 1e-8);

// f(H) = V f(diag) V^dag G.
Mat spectral_function(const EigDecomposition& eig, const Mat& gram,
                      const std::function<double(double)>& f);

double spectral_gap(const EigDecomposition& eig);

enum class SpectralSide { Plus, Minus };

// 1_{R+-}(H). Raises GapViolation when an eigenvalue sits within
// gap_floor * ||H|| of zero (default 1e-6 * ||H||).
Mat spectral_projection(const DiscreteOperator& op, SpectralSide side,
                        double gap_floor_rel = 1e-6);
Mat spectral_projection(const EigDecomposition& eig, const Mat& gram, SpectralSide side,
                        double gap_floor_abs);

// (H^2 + 1)^{1/2}.
Mat s_operator(const DiscreteOperator& op);

enum class ResolventKind { Sign, InvAbs, InvSqrtSqPlusOne };
enum class QuadScheme { TanhSinhTruncated, TanSubstitution };

struct QuadSpec {
  int nodes = 200;
  double lambda_max_factor = 50.0;  // truncation point 50 * ||H||
  double tail_tol = 1e-6;           // switch to the substituted scheme above this
  QuadScheme scheme = QuadScheme::TanhSinhTruncated;
  bool allow_fallback = true;
};

struct QuadReport {
  int nodes = 0;
  double tail_estimate = 0.0;
  QuadScheme used = QuadScheme::TanhSinhTruncated;
};

// Resolvent-integral functional calculus:
//   |H|^{-1}        = (2/pi) int_0^inf (H^2 + l^2)^{-1} dl
//   sgn(H)          = H |H|^{-1}
//   (H^2+1)^{-1/2}  = (2/pi) int_0^inf (H^2 + s^2 + 1)^{-1} ds
// evaluated by quadrature of dense resolvent solves; independent of the
// eigendecomposition route. Throws QuadratureError when the truncated-tail
// estimate exceeds tail_tol and fallback is disabled, and GapViolation for
// Sign/InvAbs on a gapless operator.
Mat resolvent_functional(const DiscreteOperator& op, ResolventKind kind,
                         const QuadSpec& spec = {}, QuadReport* report = nullptr);

}  // namespace diraclab
