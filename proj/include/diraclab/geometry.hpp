#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diraclab/fields.hpp"
#include "diraclab/grid.hpp"

namespace diraclab {

enum class Side { Out, In };  // Out: t -> +inf, In: t -> -inf
inline int side_sign(Side s) { return s == Side::Out ? +1 : -1; }
inline const char* side_name(Side s) { return s == Side::Out ? "out" : "in"; }

// Metric data on R x S^1 in the form
//   g = -c^2(t,x) dt^2 + h(t,x) (dx - b(t,x) dt)^2,
// together with a variable mass m(t,x), static asymptotic profiles and the
// declared decay exponent mu of the approach to them.
struct MetricFamily {
  Field2D lapse;    // c > 0
  Field2D shift;    // b
  Field2D spatial;  // h > 0
  Field2D mass;     // m

  Profile1D lapse_out, lapse_in;      // c_{+inf}, c_{-inf}
  Profile1D spatial_out, spatial_in;  // h_{+inf}, h_{-inf}
  Profile1D mass_out, mass_in;        // m_{+inf}, m_{-inf}

  double mu = 1.0;
  std::string name;

  // Structural facts known at construction time; the reductions require and
  // update them.
  bool shift_is_zero = false;
  bool lapse_is_one = false;
  bool time_independent = false;

  const Profile1D& lapse_profile(Side s) const { return s == Side::Out ? lapse_out : lapse_in; }
  const Profile1D& spatial_profile(Side s) const { return s == Side::Out ? spatial_out : spatial_in; }
  const Profile1D& mass_profile(Side s) const { return s == Side::Out ? mass_out : mass_in; }

  bool reduced() const { return shift_is_zero && lapse_is_one; }
};

// Built-in catalog. Parameters not in the map fall back to defaults.
//   flat     : c=1, b=0, h=1, m=mass            (static)
//   bump     : h,m carry a cos(2 pi x/L) * <t>^-mu bump plus a small odd-in-t
//              component so the out and in data genuinely differ
//   ramp     : h interpolates between different static metrics (rate 2)
//   shifted  : nonzero shift b and nonconstant lapse c, both decaying
//   massdip  : static-flat asymptotics, mass dips near t=0 (gap test case)
MetricFamily make_family(const std::string& name,
                         const std::map<std::string, double>& params, double L);

// Custom family from per-field term tables (see config.hpp for the syntax).
MetricFamily make_custom_family(const ScalarField& c, const ScalarField& b,
                                const ScalarField& h, const ScalarField& m,
                                double mu, double L, const std::string& name);

struct DecayReport {
  struct Entry {
    std::string field;    // "h", "c", "m", "b"
    int derivative;       // k in d_t^k
    double fitted;        // rho-hat; +inf when the difference vanishes
    double stderr95;      // 95% half-width of the fitted exponent
    double required;      // mu (+1 for shift) + k
    bool exact;           // sup-norms at rounding floor
    bool compliant;       // fitted >= required - 0.2
  };
  std::vector<Entry> entries;
  Side side;
  bool all_compliant() const;
};

// Log-log fit of sampled sup-norms of d_t^k(field - profile), k = 0,1,
// against <t>. Throws InvalidMetric on nonpositive h or c samples and
// InsufficientData when fewer than 4 samples or less than a decade of |t|.
DecayReport verify_decay(const MetricFamily& family, const GridSpec& grid,
                         const std::vector<double>& t_samples, Side side);

// Conformal reduction c -> 1: h~ = c^-2 h, m~ = c m. Requires b == 0.
MetricFamily conformal_reduce(const MetricFamily& family);

// Shift-flow reduction b -> 0 by pulling back along the flow of xdot = b.
// The returned evaluators solve the flow ODE on demand (cached), composed
// with the original fields. Throws FlowIntegrationFailure if the ODE
// tolerance cannot be met.
MetricFamily shift_flow_reduce(const MetricFamily& family, const GridSpec& grid,
                               double ode_tol = 1e-12);

struct ChristoffelTime {
  double gamma_101;  // Gamma^1_{01} = h^-1 dt h / 2
  double gamma_011;  // Gamma^0_{11} = dt h / 2
};

// Time-sector Christoffel symbols of g = -dt^2 + h dx^2 at (t,x). Requires a
// reduced family.
ChristoffelTime christoffel_time(const MetricFamily& family, double t, double x);

}  // namespace diraclab
