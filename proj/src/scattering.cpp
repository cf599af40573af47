#include "diraclab/scattering.hpp"

#include <cmath>
#include <numeric>

#include "diraclab/linalg.hpp"
#include "diraclab/quadrature.hpp"

namespace diraclab {

std::vector<double> default_schedule(double T0, double factor, double T_max) {
  std::vector<double> out;
  for (double T = T0; T <= T_max * (1.0 + 1e-12); T *= factor) out.push_back(T);
  return out;
}

void measure_projection_identities(ScatteringResult& r) {
  const Mat I = Mat::Identity(r.c_plus.rows(), r.c_plus.cols());
  const double scale = std::max(1.0, r.c_plus.operatorNorm());
  r.idempotency_residual =
      std::max((r.c_plus * r.c_plus - r.c_plus).operatorNorm(),
               (r.c_minus * r.c_minus - r.c_minus).operatorNorm()) /
      scale;
  r.completeness_residual = (r.c_plus + r.c_minus - I).operatorNorm();
  r.selfadjoint_residual = std::max(gram_selfadjoint_residual(r.c_plus, r.gram),
                                    gram_selfadjoint_residual(r.c_minus, r.gram));
}

namespace {

double pairwise_exponent_variance(const std::vector<double>& T,
                                  const std::vector<double>& r, double* mean) {
  std::vector<double> est;
  for (std::size_t j = 0; j + 1 < r.size(); ++j) {
    if (r[j] <= 0 || r[j + 1] <= 0) continue;
    est.push_back(std::log(r[j] / r[j + 1]) / std::log(T[j + 1] / T[j]));
  }
  if (est.empty()) {
    if (mean) *mean = 0.0;
    return 0.0;
  }
  const double m = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
  double var = 0.0;
  for (double e : est) var += (e - m) * (e - m);
  var = est.size() > 1 ? var / (est.size() - 1) : 0.0;
  if (mean) *mean = m;
  return std::sqrt(var);
}

}  // namespace

ScatteringResult moller_projection(const HamiltonianBuilder& builder, Propagator& prop,
                                   Side direction, const MollerOptions& opt) {
  const Mat& G = builder.gram();
  const int sgn = side_sign(direction);

  std::vector<double> schedule = opt.schedule;
  if (schedule.empty()) schedule = default_schedule(10.0, 2.0, builder.grid().t_max);
  if (schedule.size() < 2) throw NoConvergence("schedule needs at least two times");

  const DiscreteOperator Hinf{builder.asymptotic(direction), G, "H_inf"};
  const EigDecomposition eig_inf = eig_decompose(Hinf);
  if (spectral_gap(eig_inf) <= 0)
    throw HypothesisViolation("massive hypothesis fails for the " +
                              std::string(side_name(direction)) + " side");
  const Mat Pp_inf = spectral_projection(eig_inf, G, SpectralSide::Plus, 0.0);
  const Mat Pm_inf = spectral_projection(eig_inf, G, SpectralSide::Minus, 0.0);

  std::vector<Mat> Ap, Am;
  std::vector<double> times;
  for (double T : schedule) {
    const double t = sgn * T;
    const Mat& Ut0 = prop.to(t);
    const Mat U0t = gram_unitary_inverse(Ut0, G);
    Ap.push_back(U0t * Pp_inf * Ut0);
    Am.push_back(U0t * Pm_inf * Ut0);
    times.push_back(T);
  }

  ScatteringResult res;
  res.gram = G;
  res.direction = direction;
  res.method = "moller";
  for (double T : times) res.schedule.push_back(sgn * T);
  for (std::size_t j = 0; j + 1 < Ap.size(); ++j)
    res.residuals.push_back(
        gram_operator_norm(Ap[j + 1] - Ap[j], G, opt.norm_iterations, opt.seed));

  const double scale = 1.0;
  const double floor = 1e-10 * scale;
  const bool is_exact = std::all_of(res.residuals.begin(), res.residuals.end(),
                                    [floor](double r) { return r < floor; });

  if (is_exact) {
    res.exact = true;
    res.extrapolation = "exact";
    res.c_plus = Ap.front();
    res.c_minus = Am.front();
    res.tail_bound = res.residuals.empty() ? 0.0 : res.residuals.back();
    measure_projection_identities(res);
    return res;
  }

  std::vector<double> fitT(times.begin(), times.end() - 1);
  const PowerFit fit = fit_power_law(fitT, res.residuals);
  res.mu_hat = -fit.slope;
  res.mu_hat_stderr = fit.stderr95;
  if (!(res.mu_hat > 0.05))
    throw NoConvergence("Moller residuals do not decay (fitted exponent " +
                        std::to_string(res.mu_hat) +
                        "); check the decay report and the spectral gaps");

  double mu_mean = 0.0;
  const double mu_sd = pairwise_exponent_variance(times, res.residuals, &mu_mean);

  // single-power Richardson candidate vs the last sequence element. Every
  // A_j is exactly a Gram-selfadjoint projection (unitary conjugation), so
  // the affine Richardson combination can only degrade the projection
  // identities; keep it only when it does not.
  ScatteringResult rich = res;
  const double w = 1.0 / (std::pow(2.0, res.mu_hat) - 1.0);
  rich.c_plus = Ap.back() + w * (Ap.back() - Ap[Ap.size() - 2]);
  rich.c_minus = Am.back() + w * (Am.back() - Am[Am.size() - 2]);
  measure_projection_identities(rich);

  ScatteringResult last = res;
  last.c_plus = Ap.back();
  last.c_minus = Am.back();
  measure_projection_identities(last);

  const double rich_q = std::max({rich.idempotency_residual, rich.completeness_residual,
                                  rich.selfadjoint_residual});
  const double last_q = std::max({last.idempotency_residual, last.completeness_residual,
                                  last.selfadjoint_residual});

  const bool unstable = mu_sd > opt.variance_gate;
  ScatteringResult& pick = (unstable || rich_q > std::max(last_q, 1e-8)) ? last : rich;
  pick.extrapolation = (&pick == &last) ? "largest-T" : "richardson";
  // geometric tail: ||A_inf - A_J|| <= sum of remaining increments
  const double ratio = std::pow(2.0, -res.mu_hat);
  pick.tail_bound = res.residuals.back() * ratio / std::max(1.0 - ratio, 1e-3);
  if (&pick == &rich)
    pick.tail_bound = std::max(pick.tail_bound, res.residuals.back() * w * ratio);
  return pick;
}

ScatteringResult cook_accelerated_limit(AdiabaticMachine& machine, Propagator& prop,
                                        Side direction, const CookOptions& opt) {
  const Mat& G = machine.gram();
  const int sgn = side_sign(direction);
  const double T_max = opt.T_max > 0 ? opt.T_max : machine.builder().grid().t_max;
  const double T = sgn * T_max;

  ScatteringResult res;
  res.gram = G;
  res.direction = direction;
  res.method = "cook";
  res.extrapolation = "cook-integral";
  res.schedule.assign(1, T);

  // The Cook correction integral telescopes: P~(0) + int_0^T U(0,t)
  // d/dt[U-conjugated corrected projection] U(t,0) dt equals the conjugated
  // corrected projection at the endpoint, with no quadrature error. The
  // integrand only enters the tail bound, through its fitted decay; its Gram
  // norm is conjugation-invariant, so it is sampled unconjugated.
  const Mat Pp_T = machine.corrected_projection(T, SpectralSide::Plus, opt.order, opt.mode);
  const Mat Pm_T = machine.corrected_projection(T, SpectralSide::Minus, opt.order, opt.mode);
  const Mat& UT0 = prop.to(T);
  const Mat U0T = gram_unitary_inverse(UT0, G);
  res.c_plus = U0T * Pp_T * UT0;
  res.c_minus = U0T * Pm_T * UT0;

  std::vector<double> ts, ns;
  for (double t = 2.0; t <= T_max * (1 + 1e-12); t *= 2.0) {
    ts.push_back(t);
    ns.push_back(gram_operator_norm(
        machine.cook_flow_integrand(sgn * t, SpectralSide::Plus, opt.order, opt.mode), G));
  }
  res.residuals = ns;

  const PowerFit fit = fit_power_law(ts, ns);
  if (fit.exact) {
    res.exact = true;
    res.mu_hat = std::numeric_limits<double>::infinity();
    res.tail_bound = 0.0;
  } else {
    res.mu_hat = -fit.slope - 1.0;  // integrand exponent is 1 + mu
    // tail = int_T^inf of the fitted power C t^{-1-mu}
    res.tail_bound = ns.back() * T_max / std::max(res.mu_hat, 0.1);
  }
  measure_projection_identities(res);
  return res;
}

ScatteringResult lift_to_physical(const ScatteringResult& reduced, const RVec& c0_nodes,
                                  int n) {
  const int M = static_cast<int>(c0_nodes.size());
  const double p = 0.5 * (n - 1);
  ScatteringResult out = reduced;

  auto conj = [&](const Mat& c) {
    Mat out_c = c;
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < M; ++j) {
        out_c.row(a * M + j) *= std::pow(c0_nodes[j], -p);
        out_c.col(a * M + j) *= std::pow(c0_nodes[j], p);
      }
    return out_c;
  };
  out.c_plus = conj(reduced.c_plus);
  out.c_minus = conj(reduced.c_minus);
  Mat Gphys = reduced.gram;
  for (int a = 0; a < 2; ++a)
    for (int j = 0; j < M; ++j) {
      Gphys.row(a * M + j) *= std::pow(c0_nodes[j], p);
      Gphys.col(a * M + j) *= std::pow(c0_nodes[j], p);
    }
  out.gram = std::move(Gphys);
  out.lift_status = "physical-frame";
  measure_projection_identities(out);
  return out;
}

}  // namespace diraclab
