#include "diraclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>

#include "diraclab/fits.hpp"
#include "diraclab/ode.hpp"

namespace diraclab {

namespace {

MetricFamily from_scalar_fields(const ScalarField& c, const ScalarField& b,
                                const ScalarField& h, const ScalarField& m, double mu,
                                const std::string& name) {
  MetricFamily fam;
  fam.lapse = Field2D::wrap(c);
  fam.shift = Field2D::wrap(b);
  fam.spatial = Field2D::wrap(h);
  fam.mass = Field2D::wrap(m);
  fam.lapse_out = Profile1D::wrap(c.limit_profile(+1));
  fam.lapse_in = Profile1D::wrap(c.limit_profile(-1));
  fam.spatial_out = Profile1D::wrap(h.limit_profile(+1));
  fam.spatial_in = Profile1D::wrap(h.limit_profile(-1));
  fam.mass_out = Profile1D::wrap(m.limit_profile(+1));
  fam.mass_in = Profile1D::wrap(m.limit_profile(-1));
  fam.mu = mu;
  fam.name = name;

  auto is_const_one = [](const ScalarField& f) {
    ScalarField::Term t;
    double v = 0.0;
    for (const auto& term : f.terms) {
      if (term.env.kind != Envelope::Kind::Const) return false;
      if (term.profile.dx(0.3) != 0.0 || term.profile.dx(1.1) != 0.0) return false;
      v += term.profile.a0;
    }
    return v == 1.0;
  };
  auto is_zero = [](const ScalarField& f) {
    for (const auto& term : f.terms) {
      if (term.profile.a0 != 0.0) return false;
      for (double x : term.profile.ac)
        if (x != 0.0) return false;
      for (double x : term.profile.as)
        if (x != 0.0) return false;
    }
    return true;
  };
  fam.shift_is_zero = is_zero(b);
  fam.lapse_is_one = is_const_one(c);
  fam.time_independent = c.time_independent() && b.time_independent() &&
                         h.time_independent() && m.time_independent();
  return fam;
}

double param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
  auto it = p.find(key);
  return it == p.end() ? dflt : it->second;
}

ScalarField cosine_bump(double base, double amp, int harmonic, const Envelope& env,
                        double L) {
  ScalarField f = ScalarField::constant(base, L);
  if (amp != 0.0) {
    FourierProfile p;
    p.L = L;
    p.ac.assign(harmonic, 0.0);
    p.ac[harmonic - 1] = amp;
    f.terms.push_back({p, env});
  }
  return f;
}

}  // namespace

MetricFamily make_family(const std::string& name,
                         const std::map<std::string, double>& params, double L) {
  const double mu = param(params, "mu", 1.5);
  const double mass = param(params, "mass", 1.0);
  const ScalarField one = ScalarField::constant(1.0, L);
  const ScalarField zero = ScalarField::constant(0.0, L);

  if (name == "flat") {
    return from_scalar_fields(one, zero, one, ScalarField::constant(mass, L), mu, name);
  }

  if (name == "bump") {
    const double amp = param(params, "amplitude", 0.3);
    const double masym = param(params, "asymmetry", 0.1);
    ScalarField h = cosine_bump(1.0, amp, 1, Envelope::inv_pow(mu), L);
    ScalarField m = cosine_bump(mass, param(params, "mass_amplitude", 0.1), 1,
                                Envelope::inv_pow(mu), L);
    MetricFamily fam = from_scalar_fields(one, zero, h, m, mu, name);
    if (masym != 0.0) {
      // odd-in-t component sin(x) * t * <t>^{-mu-1}: same decay class,
      // breaks the t -> -t symmetry so out and in data genuinely differ.
      // The term algebra has no envelope products, so it is attached
      // through the type-erased layer.
      Field2D base = fam.spatial;
      const double w = 2.0 * M_PI / L;
      auto odd = [masym, mu, w](double t, double x) {
        return masym * std::sin(w * x) * t * std::pow(1.0 + t * t, -0.5 * (mu + 1.0));
      };
      auto odd_t = [masym, mu, w](double t, double x) {
        const double br = 1.0 + t * t;
        return masym * std::sin(w * x) *
               (std::pow(br, -0.5 * (mu + 1.0)) -
                (mu + 1.0) * t * t * std::pow(br, -0.5 * (mu + 1.0) - 1.0));
      };
      auto odd_x = [masym, mu, w](double t, double x) {
        return masym * w * std::cos(w * x) * t * std::pow(1.0 + t * t, -0.5 * (mu + 1.0));
      };
      fam.spatial.f = [base, odd](double t, double x) { return base.f(t, x) + odd(t, x); };
      fam.spatial.f_t = [base, odd_t](double t, double x) {
        return base.f_t(t, x) + odd_t(t, x);
      };
      fam.spatial.f_x = [base, odd_x](double t, double x) {
        return base.f_x(t, x) + odd_x(t, x);
      };
      fam.time_independent = false;
    }
    return fam;
  }

  if (name == "ramp") {
    const double h_mid = param(params, "h_mid", 1.25);
    const double h_step = param(params, "h_step", 0.75);
    const double amp = param(params, "amplitude", 0.2);
    ScalarField h = ScalarField::constant(h_mid, L);
    h.terms.push_back({FourierProfile{L, h_step, {}, {}}, Envelope::odd_ramp()});
    if (amp != 0.0) {
      FourierProfile p;
      p.L = L;
      p.ac = {amp};
      h.terms.push_back({p, Envelope::inv_pow(2.0)});
    }
    return from_scalar_fields(one, zero, h, ScalarField::constant(mass, L), 2.0, name);
  }

  if (name == "shifted") {
    const double bamp = param(params, "shift_amplitude", 0.1);
    const double camp = param(params, "lapse_amplitude", 0.15);
    const double cprof = param(params, "lapse_profile", 0.2);
    ScalarField b;
    {
      FourierProfile p;
      p.L = L;
      p.as = {bamp};
      b.terms.push_back({p, Envelope::inv_pow(1.0 + mu)});
    }
    ScalarField c = cosine_bump(1.0, cprof, 1, Envelope::constant(), L);
    if (camp != 0.0) {
      FourierProfile p;
      p.L = L;
      p.ac = {camp};
      c.terms.push_back({p, Envelope::inv_pow(mu)});
    }
    ScalarField h = cosine_bump(1.0, param(params, "amplitude", 0.3), 1,
                                Envelope::inv_pow(mu), L);
    return from_scalar_fields(c, b, h, ScalarField::constant(mass, L), mu, name);
  }

  if (name == "massdip") {
    const double dip = param(params, "dip", 0.8);
    const double tau = param(params, "tau", 1.0);
    ScalarField m = ScalarField::constant(mass, L);
    m.terms.push_back({FourierProfile{L, -dip, {}, {}}, Envelope::gauss(tau)});
    return from_scalar_fields(one, zero, one, m, mu, name);
  }

  throw ConfigError("unknown family name: " + name);
}

MetricFamily make_custom_family(const ScalarField& c, const ScalarField& b,
                                const ScalarField& h, const ScalarField& m, double mu,
                                double L, const std::string& name) {
  (void)L;
  return from_scalar_fields(c, b, h, m, mu, name);
}

bool DecayReport::all_compliant() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const Entry& e) { return e.compliant; });
}

DecayReport verify_decay(const MetricFamily& family, const GridSpec& grid,
                         const std::vector<double>& t_samples, Side side) {
  if (t_samples.size() < 4)
    throw InsufficientData("verify_decay needs at least 4 time samples");
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : t_samples) {
    lo = std::min(lo, std::abs(t));
    hi = std::max(hi, std::abs(t));
  }
  if (lo <= 0 || hi / lo < 10.0)
    throw InsufficientData("verify_decay samples must span at least a decade of |t|");

  const int sgn = side_sign(side);
  const RVec x = grid.nodes();

  struct Probe {
    std::string label;
    const Field2D* field;
    const Profile1D* profile;
    double required0;
  };
  const std::vector<Probe> probes = {
      {"h", &family.spatial, &family.spatial_profile(side), family.mu},
      {"c", &family.lapse, &family.lapse_profile(side), family.mu},
      {"m", &family.mass, &family.mass_profile(side), family.mu},
      {"b", &family.shift, nullptr, 1.0 + family.mu},
  };

  DecayReport report;
  report.side = side;
  for (const auto& probe : probes) {
    for (int k = 0; k <= 1; ++k) {
      std::vector<double> ts, sups;
      for (double t0 : t_samples) {
        const double t = sgn * std::abs(t0);
        double sup = 0.0;
        for (int j = 0; j < grid.M; ++j) {
          const double hval = family.spatial(t, x[j]);
          const double cval = family.lapse(t, x[j]);
          if (hval <= 0.0 || cval <= 0.0)
            throw InvalidMetric("nonpositive h or c at sampled point");
          double v;
          if (k == 0) {
            v = probe.field->f(t, x[j]) - (probe.profile ? probe.profile->f(x[j]) : 0.0);
          } else {
            v = probe.field->f_t(t, x[j]);  // profiles are t-independent
          }
          sup = std::max(sup, std::abs(v));
        }
        ts.push_back(std::sqrt(1.0 + t * t));  // fit against <t>
        sups.push_back(sup);
      }
      const PowerFit fit = fit_power_law(ts, sups);
      DecayReport::Entry entry;
      entry.field = probe.label;
      entry.derivative = k;
      entry.required = probe.required0 + k;
      entry.exact = fit.exact;
      entry.fitted = fit.exact ? std::numeric_limits<double>::infinity() : -fit.slope;
      entry.stderr95 = fit.stderr95;
      entry.compliant = entry.exact || entry.fitted >= entry.required - 0.2;
      report.entries.push_back(entry);
    }
  }
  return report;
}

MetricFamily conformal_reduce(const MetricFamily& family) {
  if (!family.shift_is_zero)
    throw ReductionOrderViolation("conformal_reduce requires b == 0 (run shift_flow_reduce first)");
  if (family.lapse_is_one) return family;

  MetricFamily out = family;
  const Field2D c = family.lapse, h = family.spatial, m = family.mass;

  out.lapse = Field2D::constant(1.0);
  out.lapse_is_one = true;

  out.spatial.f = [c, h](double t, double x) {
    const double cv = c.f(t, x);
    return h.f(t, x) / (cv * cv);
  };
  out.spatial.f_t = [c, h](double t, double x) {
    const double cv = c.f(t, x);
    return h.f_t(t, x) / (cv * cv) - 2.0 * h.f(t, x) * c.f_t(t, x) / (cv * cv * cv);
  };
  out.spatial.f_x = [c, h](double t, double x) {
    const double cv = c.f(t, x);
    return h.f_x(t, x) / (cv * cv) - 2.0 * h.f(t, x) * c.f_x(t, x) / (cv * cv * cv);
  };

  out.mass.f = [c, m](double t, double x) { return c.f(t, x) * m.f(t, x); };
  out.mass.f_t = [c, m](double t, double x) {
    return c.f_t(t, x) * m.f(t, x) + c.f(t, x) * m.f_t(t, x);
  };
  out.mass.f_x = [c, m](double t, double x) {
    return c.f_x(t, x) * m.f(t, x) + c.f(t, x) * m.f_x(t, x);
  };

  auto transform_profiles = [](const Profile1D& cp, const Profile1D& hp,
                               const Profile1D& mp) {
    Profile1D h_out, m_out;
    h_out.f = [cp, hp](double x) {
      const double cv = cp.f(x);
      return hp.f(x) / (cv * cv);
    };
    h_out.f_x = [cp, hp](double x) {
      const double cv = cp.f(x);
      return hp.f_x(x) / (cv * cv) - 2.0 * hp.f(x) * cp.f_x(x) / (cv * cv * cv);
    };
    m_out.f = [cp, mp](double x) { return cp.f(x) * mp.f(x); };
    m_out.f_x = [cp, mp](double x) {
      return cp.f_x(x) * mp.f(x) + cp.f(x) * mp.f_x(x);
    };
    return std::make_pair(h_out, m_out);
  };
  std::tie(out.spatial_out, out.mass_out) =
      transform_profiles(family.lapse_out, family.spatial_out, family.mass_out);
  std::tie(out.spatial_in, out.mass_in) =
      transform_profiles(family.lapse_in, family.spatial_in, family.mass_in);
  out.lapse_out = Profile1D::constant(1.0);
  out.lapse_in = Profile1D::constant(1.0);
  out.name = family.name + "+conformal";
  return out;
}

namespace {

// Flow map y -> x(t,0,y) of xdot = b(t,x) on the circle, with the Jacobian
// J = dx/dy integrated alongside. Solutions are cached per initial point and
// continued from the nearest already-integrated time, so a monotone sweep in
// t (the propagation loop) costs one integration pass per node in total.
struct FlowSolver {
  Field2D b;
  double tol;

  struct Point {
    double x, J;
  };

  std::mutex guard;
  std::map<long long, std::map<double, Point>> cache;  // bit-pattern of y -> t -> point

  static long long key_of(double y) {
    long long k;
    static_assert(sizeof(double) == sizeof(long long));
    std::memcpy(&k, &y, sizeof(double));
    return k;
  }

  Point solve(double t, double y) {
    std::lock_guard<std::mutex> lock(guard);
    auto& line = cache[key_of(y)];
    if (line.empty()) line.emplace(0.0, Point{y, 1.0});
    auto it = line.find(t);
    if (it != line.end()) return it->second;

    double t_start = 0.0;
    Point start{y, 1.0};
    for (const auto& [ct, pt] : line)
      if (ct * t >= 0 && std::abs(ct) <= std::abs(t) && std::abs(ct) >= std::abs(t_start)) {
        t_start = ct;
        start = pt;
      }

    auto rhs = [this](double s, const std::vector<double>& st) {
      return std::vector<double>{b.f(s, st[0]), b.f_x(s, st[0]) * st[1]};
    };
    const OdeResult r = integrate_ode(rhs, {start.x, start.J}, t_start, t, tol);
    const Point pt{r.y[0], r.y[1]};
    if (line.size() > 40000) line.clear();
    line.emplace(t, pt);
    return pt;
  }
};

}  // namespace

MetricFamily shift_flow_reduce(const MetricFamily& family, const GridSpec& grid,
                               double ode_tol) {
  if (family.shift_is_zero) return family;

  auto solver = std::make_shared<FlowSolver>();
  solver->b = family.shift;
  solver->tol = ode_tol;
  auto flow = [solver](double t, double y) { return solver->solve(t, y); };

  // the flow settles once |b| has decayed; T_profile is where profiles are read
  const double T_profile = std::max(4.0 * grid.t_max, 1e4);

  MetricFamily out = family;
  out.shift = Field2D::constant(0.0);
  out.shift_is_zero = true;
  out.name = family.name + "+flow";
  out.time_independent = false;

  const Field2D h = family.spatial, c = family.lapse, m = family.mass, b = family.shift;

  auto pullback_value = [flow](const Field2D& f, bool with_J2) {
    return [flow, f, with_J2](double t, double y) {
      const auto pt = flow(t, y);
      const double base = f.f(t, pt.x);
      return with_J2 ? base * pt.J * pt.J : base;
    };
  };
  // d/dt of the pullback: material derivative along the flow plus the
  // Jacobian rate dJ/dt = (dx b) J.
  auto pullback_dt = [flow, b](const Field2D& f, bool with_J2) {
    return [flow, b, f, with_J2](double t, double y) {
      const auto pt = flow(t, y);
      const double fval = f.f(t, pt.x);
      const double mat = f.f_t(t, pt.x) + f.f_x(t, pt.x) * b.f(t, pt.x);
      if (!with_J2) return mat;
      const double Jdot = b.f_x(t, pt.x) * pt.J;
      return mat * pt.J * pt.J + 2.0 * fval * pt.J * Jdot;
    };
  };
  // dx via centered differences of the composed evaluator; only diagnostic
  // paths touch it (assembly differentiates spectrally on the grid).
  auto pullback_dx = [flow](const Field2D& f, bool with_J2) {
    return [flow, f, with_J2](double t, double y) {
      const double eta = 1e-5;
      auto val = [&](double yy) {
        const auto pt = flow(t, yy);
        const double base = f.f(t, pt.x);
        return with_J2 ? base * pt.J * pt.J : base;
      };
      return (val(y + eta) - val(y - eta)) / (2.0 * eta);
    };
  };

  out.spatial = Field2D{pullback_value(h, true), pullback_dt(h, true), pullback_dx(h, true)};
  out.lapse = Field2D{pullback_value(c, false), pullback_dt(c, false), pullback_dx(c, false)};
  out.mass = Field2D{pullback_value(m, false), pullback_dt(m, false), pullback_dx(m, false)};

  auto profile = [flow, T_profile](const Profile1D& p, int sgn, bool with_J2) {
    Profile1D out_p;
    out_p.f = [flow, T_profile, p, sgn, with_J2](double y) {
      const auto pt = flow(sgn * T_profile, y);
      const double base = p.f(pt.x);
      return with_J2 ? base * pt.J * pt.J : base;
    };
    out_p.f_x = [out_p](double y) {
      const double eta = 1e-5;
      return (out_p.f(y + eta) - out_p.f(y - eta)) / (2.0 * eta);
    };
    return out_p;
  };
  out.spatial_out = profile(family.spatial_out, +1, true);
  out.spatial_in = profile(family.spatial_in, -1, true);
  out.lapse_out = profile(family.lapse_out, +1, false);
  out.lapse_in = profile(family.lapse_in, -1, false);
  out.mass_out = profile(family.mass_out, +1, false);
  out.mass_in = profile(family.mass_in, -1, false);
  return out;
}

ChristoffelTime christoffel_time(const MetricFamily& family, double t, double x) {
  if (!family.reduced())
    throw ReductionOrderViolation("christoffel_time requires a reduced family (c == 1, b == 0)");
  const double h = family.spatial(t, x);
  const double ht = family.spatial.f_t(t, x);
  return {0.5 * ht / h, 0.5 * ht};
}

}  // namespace diraclab
