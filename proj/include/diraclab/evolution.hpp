#pragma once

#include <functional>
#include <map>
#include <vector>

#include "diraclab/operators.hpp"

namespace diraclab {

enum class Scheme { Magnus2, CrankNicolson };

struct StepperConfig {
  Scheme scheme = Scheme::Magnus2;
  double dt = 0.02;          // base step inside |t| <= adapt_knee
  double adapt_knee = 10.0;  // beyond it the step grows like |t|/adapt_knee
  double drift_tol = 1e-8;   // unitarity budget per checkpoint
};

// Cauchy evolution U(t,s) of dt psi = i H(t) psi as a Gram-unitary dense
// propagator. U(t,0) matrices are cached at every requested time; arbitrary
// (t,s) pairs are served through the group property, with the Gram-unitary
// inverse standing in for backward propagation.
class Propagator {
 public:
  Propagator(std::function<Mat(double)> generator, Mat gram, StepperConfig cfg,
             double t_window);

  const Mat& to(double t);                 // U(t, 0)
  Mat matrix(double t, double s);          // U(t, s)
  Vec evolve(const Vec& f, double s, double t);

  // Stand-alone stepping over [a,b] without touching the cache; used by the
  // reversal and self-convergence tests.
  Mat raw_interval(double a, double b, double dt_override = 0.0) const;

  double max_drift() const { return max_drift_; }
  const Mat& gram() const { return gram_; }
  const StepperConfig& config() const { return cfg_; }
  std::vector<double> checkpoint_times() const;

 private:
  Mat step_matrix(double t0, double dt) const;
  void advance(Mat& U, double from, double to) const;
  double step_size(double t) const;

  std::function<Mat(double)> gen_;
  Mat gram_;
  StepperConfig cfg_;
  double window_;
  int dim_;
  std::map<double, Mat> cache_;
  mutable double max_drift_ = 0.0;
};

// Conformal lift of a reduced-frame propagator matrix to the original frame:
// U = diag(c_t^{(1-n)/2}) U~ diag(c_s^{(n-1)/2}) with the lapse sampled on
// the two surfaces (n = 2 here). Unitary for the transformed Gram G~ diag(c).
Mat conformal_lift(const Mat& U_tilde, const RVec& c_t_nodes, const RVec& c_s_nodes,
                   int n = 2);

}  // namespace diraclab
