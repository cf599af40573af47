#include "diraclab/evolution.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "diraclab/linalg.hpp"

namespace diraclab {

Propagator::Propagator(std::function<Mat(double)> generator, Mat gram, StepperConfig cfg,
                       double t_window)
    : gen_(std::move(generator)), gram_(std::move(gram)), cfg_(cfg), window_(t_window) {
  const Mat H0 = gen_(0.0);
  dim_ = static_cast<int>(H0.rows());
  cache_[0.0] = Mat::Identity(dim_, dim_);
}

double Propagator::step_size(double t) const {
  const double knee = cfg_.adapt_knee;
  // generator varies like <t>^{-1-mu}; growing steps beyond the knee keeps
  // the local error summable while reaching T ~ 10^3 in O(log T) work
  return cfg_.dt * std::max(1.0, std::abs(t) / knee);
}

Mat Propagator::step_matrix(double t0, double dt) const {
  const Mat H = gen_(t0 + 0.5 * dt);
  if (cfg_.scheme == Scheme::Magnus2) {
    Mat A = cplx(0.0, 1.0) * dt * H;
    Mat E = A.exp();
    if (!E.allFinite()) throw ExpSeriesError("matrix exponential failed in stepper");
    return E;
  }
  // Crank-Nicolson: Cayley transform, Gram-unitary up to solve roundoff
  const Mat I = Mat::Identity(dim_, dim_);
  const Mat A = cplx(0.0, 0.5) * dt * H;
  return (I - A).partialPivLu().solve(I + A);
}

void Propagator::advance(Mat& U, double from, double to) const {
  const double dir = (to > from) ? 1.0 : -1.0;
  double t = from;
  int guard = 0;
  while (dir * (to - t) > 1e-12) {
    double dt = dir * step_size(t);
    if (dir * (t + dt - to) > 0) dt = to - t;
    U = step_matrix(t, dt) * U;
    t += dt;
    if (++guard > 50000000) throw UnitarityDriftError("step budget exhausted");
  }
}

const Mat& Propagator::to(double t) {
  if (std::abs(t) > window_ + 1e-9)
    throw UnitarityDriftError("requested time outside the configured window");
  auto it = cache_.find(t);
  if (it != cache_.end()) return it->second;

  // start from the nearest cached time on the same side of 0
  double best = 0.0;
  for (const auto& [ct, cu] : cache_) {
    if (ct * t >= 0 && std::abs(ct) <= std::abs(t) && std::abs(ct) > std::abs(best))
      best = ct;
  }
  Mat U = cache_.at(best);
  advance(U, best, t);

  const double drift = gram_unitarity_residual(U, gram_);
  max_drift_ = std::max(max_drift_, drift);
  if (drift > cfg_.drift_tol)
    throw UnitarityDriftError("unitarity drift " + std::to_string(drift) +
                              " over [0," + std::to_string(t) + "] exceeds budget");
  return cache_.emplace(t, std::move(U)).first->second;
}

Mat Propagator::matrix(double t, double s) {
  if (t == s) return Mat::Identity(dim_, dim_);
  if (s == 0.0) return to(t);
  const Mat& Us = to(s);
  const Mat& Ut = to(t);
  return Ut * gram_unitary_inverse(Us, gram_);
}

Vec Propagator::evolve(const Vec& f, double s, double t) {
  if (t == s) return f;
  return matrix(t, s) * f;
}

Mat Propagator::raw_interval(double a, double b, double dt_override) const {
  Mat U = Mat::Identity(dim_, dim_);
  if (a == b) return U;
  if (dt_override > 0) {
    const double dir = (b > a) ? 1.0 : -1.0;
    double t = a;
    while (dir * (b - t) > 1e-12) {
      double dt = dir * dt_override;
      if (dir * (t + dt - b) > 0) dt = b - t;
      U = step_matrix(t, dt) * U;
      t += dt;
    }
    return U;
  }
  advance(U, a, b);
  return U;
}

std::vector<double> Propagator::checkpoint_times() const {
  std::vector<double> ts;
  ts.reserve(cache_.size());
  for (const auto& [ct, u] : cache_) ts.push_back(ct);
  return ts;
}

Mat conformal_lift(const Mat& U_tilde, const RVec& c_t_nodes, const RVec& c_s_nodes, int n) {
  const int M = static_cast<int>(c_t_nodes.size());
  const double p = 0.5 * (n - 1);
  Mat U = U_tilde;
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < M; ++j) {
      U.row(a * M + j) *= std::pow(c_t_nodes[j], -p);
      U.col(a * M + j) *= std::pow(c_s_nodes[j], p);
    }
  return U;
}

}  // namespace diraclab
