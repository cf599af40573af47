#include "diraclab/funcalc.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "diraclab/linalg.hpp"
#include "diraclab/quadrature.hpp"

namespace diraclab {

EigDecomposition eig_decompose(const DiscreteOperator& op, double adjoint_tol) {
  const double res = gram_selfadjoint_residual(op.matrix, op.gram);
  if (res > adjoint_tol)
    throw AdjointError("operator '" + op.label + "' is not Gram-selfadjoint (residual " +
                       std::to_string(res) + ")");

  // Cholesky congruence G = L L^dag reduces H v = lambda v with G-orthonormal
  // v to the standard Hermitian problem for B = L^dag H L^-dag.
  Eigen::LLT<Mat> llt(op.gram);
  const Mat L = llt.matrixL();
  Mat B = L.adjoint() * op.matrix;  // L^dag H
  B = Mat(L.triangularView<Eigen::Lower>().solve(B.adjoint())).adjoint();
  B = 0.5 * (B + Mat(B.adjoint()));  // scrub roundoff asymmetry

  Eigen::SelfAdjointEigenSolver<Mat> solver(B);
  EigDecomposition eig;
  eig.values = solver.eigenvalues();
  const Mat Lh = L.adjoint();
  eig.vectors = Lh.triangularView<Eigen::Upper>().solve(solver.eigenvectors());
  return eig;
}

Mat spectral_function(const EigDecomposition& eig, const Mat& gram,
                      const std::function<double(double)>& f) {
  Vec fvals(eig.values.size());
  for (int i = 0; i < eig.values.size(); ++i) fvals[i] = f(eig.values[i]);
  return eig.vectors * fvals.asDiagonal() * eig.vectors.adjoint() * gram;
}

double spectral_gap(const EigDecomposition& eig) {
  return eig.values.cwiseAbs().minCoeff();
}

Mat spectral_projection(const EigDecomposition& eig, const Mat& gram, SpectralSide side,
                        double gap_floor_abs) {
  if (spectral_gap(eig) < gap_floor_abs)
    throw GapViolation("eigenvalue within the declared spectral gap");
  const double sgn = (side == SpectralSide::Plus) ? 1.0 : -1.0;
  return spectral_function(eig, gram, [sgn](double l) { return sgn * l > 0 ? 1.0 : 0.0; });
}

Mat spectral_projection(const DiscreteOperator& op, SpectralSide side, double gap_floor_rel) {
  const EigDecomposition eig = eig_decompose(op);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  return spectral_projection(eig, op.gram, side, gap_floor_rel * scale);
}

Mat s_operator(const DiscreteOperator& op) {
  const EigDecomposition eig = eig_decompose(op);
  return spectral_function(eig, op.gram, [](double l) { return std::sqrt(l * l + 1.0); });
}

namespace {

// coef * sum_q w_q (H^2 + shift + lambda_q^2)^{-1} by dense solves
Mat resolvent_sum(const Mat& H2, double shift, const QuadRule& rule) {
  const int n = static_cast<int>(H2.rows());
  Mat sum = Mat::Zero(n, n);
  Mat work(n, n);
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double l = rule.nodes[q];
    work = H2;
    work.diagonal().array() += shift + l * l;
    sum += rule.weights[q] * work.partialPivLu().solve(Mat::Identity(n, n));
  }
  return (2.0 / M_PI) * sum;
}

// smallest |eigenvalue| estimate by inverse power iteration (no eig route)
double gap_estimate(const Mat& H) {
  const int n = static_cast<int>(H.rows());
  Eigen::PartialPivLU<Mat> lu(H);
  std::mt19937_64 rng(0x5eed);
  Vec v = random_spinor(n, rng);
  v /= v.norm();
  double inv_norm = 0.0;
  for (int it = 0; it < 30; ++it) {
    Vec w = lu.solve(v);
    inv_norm = w.norm();
    if (!std::isfinite(inv_norm) || inv_norm > 1e14) return 0.0;
    v = w / inv_norm;
  }
  return inv_norm > 0 ? 1.0 / inv_norm : 0.0;
}

}  // namespace

Mat resolvent_functional(const DiscreteOperator& op, ResolventKind kind,
                         const QuadSpec& spec, QuadReport* report) {
  const Mat H2 = op.matrix * op.matrix;
  const double hnorm = std::max(gram_operator_norm(op.matrix, op.gram), 1e-30);
  const double shift = (kind == ResolventKind::InvSqrtSqPlusOne) ? 1.0 : 0.0;

  double gap = 1.0;  // effective distance of the integrand poles from 0
  if (kind != ResolventKind::InvSqrtSqPlusOne) {
    gap = gap_estimate(op.matrix);
    if (gap < 1e-10 * std::max(hnorm, 1.0))
      throw GapViolation("resolvent functional needs a spectral gap for this kind");
  }

  QuadScheme used = spec.scheme;
  double tail = 0.0;
  Mat integral;
  bool computed = false;

  if (spec.scheme == QuadScheme::TanhSinhTruncated) {
    const double lmax = spec.lambda_max_factor * hnorm;
    // the integrand tail is O(lambda^-2); truncation leaves ~ (2/pi)/lmax
    tail = (2.0 / M_PI) * hnorm / lmax;
    if (tail > spec.tail_tol) {
      if (!spec.allow_fallback)
        throw QuadratureError("truncated-tail estimate " + std::to_string(tail) +
                              " above tolerance; substituted scheme disabled");
      used = QuadScheme::TanSubstitution;
    } else {
      integral = resolvent_sum(H2, shift, tanh_sinh(spec.nodes, 0.0, lmax));
      computed = true;
    }
  } else {
    used = QuadScheme::TanSubstitution;
  }

  if (!computed) {
    // lambda = s tan(pi theta/2) maps (0,1) onto (0,inf); the transformed
    // integrand extends analytically to theta = 1. The geometric-mean scale
    // keeps the resolvent poles at +- i*gap away from the contour.
    const double s = std::sqrt(std::max(gap, 1e-6 * hnorm) * hnorm);
    const QuadRule theta = gauss_legendre(spec.nodes, 0.0, 1.0);
    QuadRule rule;
    rule.nodes.reserve(theta.nodes.size());
    rule.weights.reserve(theta.nodes.size());
    for (std::size_t i = 0; i < theta.nodes.size(); ++i) {
      const double tn = std::tan(0.5 * M_PI * theta.nodes[i]);
      rule.nodes.push_back(s * tn);
      rule.weights.push_back(theta.weights[i] * s * 0.5 * M_PI * (1.0 + tn * tn));
    }
    integral = resolvent_sum(H2, shift, rule);
    tail = 0.0;
  }

  if (report) {
    report->nodes = spec.nodes;
    report->tail_estimate = tail;
    report->used = used;
  }

  switch (kind) {
    case ResolventKind::InvAbs:
    case ResolventKind::InvSqrtSqPlusOne:
      return integral;
    case ResolventKind::Sign:
      return op.matrix * integral;
  }
  return integral;
}

}  // namespace diraclab
