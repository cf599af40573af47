#include "diraclab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace diraclab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  std::string section = "global";
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse(text);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  auto s = sections_.find(section);
  if (s == sections_.end()) return fallback;
  auto k = s->second.find(key);
  return k == s->second.end() ? fallback : k->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key, "");
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(section + "." + key + ": not a number: '" + v + "'");
  }
}

int Config::get_int(const std::string& section, const std::string& key, int fallback) const {
  const double x = get_double(section, key, fallback);
  const int i = static_cast<int>(std::llround(x));
  if (x != static_cast<double>(i))
    throw ConfigError(section + "." + key + ": not an integer");
  return i;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  sections_[section][key] = value;
}

std::string Config::canonical() const {
  std::ostringstream out;
  for (const auto& [sec, kv] : sections_) {
    if (kv.empty()) continue;
    out << "[" << sec << "]\n";
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
  }
  return out.str();
}

ScalarField parse_field_terms(const std::string& text, double L) {
  ScalarField field;
  for (const std::string& term_text : split(text, ';')) {
    if (term_text.empty()) continue;
    std::stringstream ts(term_text);
    std::vector<std::string> tokens;
    std::string tok;
    while (ts >> tok) tokens.push_back(tok);
    if (tokens.empty()) continue;

    ScalarField::Term term;
    term.profile.L = L;
    std::size_t i = 0;
    double amp;
    try {
      amp = std::stod(tokens[i++]);
    } catch (const std::exception&) {
      throw ConfigError("field term must start with an amplitude: '" + term_text + "'");
    }
    if (i < tokens.size() && (tokens[i] == "cos" || tokens[i] == "sin")) {
      const bool is_cos = tokens[i] == "cos";
      ++i;
      if (i >= tokens.size()) throw ConfigError("missing harmonic index in '" + term_text + "'");
      const int n = std::stoi(tokens[i++]);
      if (n < 1) throw ConfigError("harmonic index must be >= 1");
      auto& coeffs = is_cos ? term.profile.ac : term.profile.as;
      coeffs.assign(n, 0.0);
      coeffs[n - 1] = amp;
    } else {
      term.profile.a0 = amp;
    }
    term.env = Envelope::constant();
    if (i < tokens.size()) {
      if (tokens[i] != "*")
        throw ConfigError("expected '*' before the envelope in '" + term_text + "'");
      ++i;
      if (i >= tokens.size()) throw ConfigError("missing envelope in '" + term_text + "'");
      const std::string env = tokens[i++];
      if (env == "const") {
        term.env = Envelope::constant();
      } else if (env == "invpow") {
        if (i >= tokens.size()) throw ConfigError("invpow needs an exponent");
        term.env = Envelope::inv_pow(std::stod(tokens[i++]));
      } else if (env == "gauss") {
        if (i >= tokens.size()) throw ConfigError("gauss needs a width");
        term.env = Envelope::gauss(std::stod(tokens[i++]));
      } else if (env == "oddramp") {
        term.env = Envelope::odd_ramp();
      } else {
        throw ConfigError("unknown envelope '" + env + "'");
      }
    }
    if (i != tokens.size()) throw ConfigError("trailing tokens in field term '" + term_text + "'");
    field.terms.push_back(term);
  }
  if (field.terms.empty()) field = ScalarField::constant(0.0, L);
  return field;
}

ExperimentConfig ExperimentConfig::from(const Config& cfg) {
  ExperimentConfig ec;
  ec.family_name = cfg.get("family", "name", "flat");
  ec.mu = cfg.get_double("family", "mu", 1.5);
  for (const char* key : {"mass", "amplitude", "asymmetry", "mass_amplitude", "h_mid",
                          "h_step", "shift_amplitude", "lapse_amplitude", "lapse_profile",
                          "dip", "tau"}) {
    if (cfg.has("family", key))
      ec.family_params[key] = cfg.get_double("family", key, 0.0);
  }
  ec.family_params["mu"] = ec.mu;
  for (const char* key : {"c", "b", "h", "m"}) {
    if (cfg.has("family", key)) ec.custom_fields[key] = cfg.get("family", key, "");
  }

  ec.grid.L = cfg.get_double("grid", "circumference", 2.0 * M_PI);
  ec.grid.M = cfg.get_int("grid", "points", 64);
  ec.grid.t_max = cfg.get_double("grid", "t_max", 640.0);
  const std::string spin = cfg.get("grid", "spin_structure", "periodic");
  if (spin == "periodic")
    ec.grid.spin = SpinStructure::Periodic;
  else if (spin == "antiperiodic")
    ec.grid.spin = SpinStructure::Antiperiodic;
  else
    throw ConfigError("grid.spin_structure must be periodic or antiperiodic");
  if (ec.grid.M <= 0 || ec.grid.M % 2 != 0)
    throw ConfigError("grid.points must be a positive even integer");

  const std::string scheme = cfg.get("evolution", "scheme", "magnus2");
  if (scheme == "magnus2")
    ec.stepper.scheme = Scheme::Magnus2;
  else if (scheme == "crank_nicolson")
    ec.stepper.scheme = Scheme::CrankNicolson;
  else
    throw ConfigError("evolution.scheme must be magnus2 or crank_nicolson");
  ec.stepper.dt = cfg.get_double("evolution", "dt", 0.02);
  ec.stepper.drift_tol = cfg.get_double("evolution", "drift_tol", 1e-8);
  ec.stepper.adapt_knee = cfg.get_double("evolution", "adapt_knee", 10.0);

  ec.T0 = cfg.get_double("scattering", "T0", 10.0);
  ec.schedule_factor = cfg.get_double("scattering", "schedule_factor", 2.0);
  ec.directions = cfg.get("scattering", "direction", "both");
  if (ec.directions != "out" && ec.directions != "in" && ec.directions != "both")
    throw ConfigError("scattering.direction must be out, in or both");
  ec.correction_order = cfg.get_int("scattering", "correction_order", 1);

  ec.symbol_n_min = cfg.get_int("diagnostics", "symbol_kmin", 8);
  ec.seed = static_cast<std::uint64_t>(cfg.get_double("diagnostics", "seed", 1));
  return ec;
}

MetricFamily ExperimentConfig::build_family() const {
  if (family_name == "custom") {
    auto get_field = [&](const char* key, double dflt) {
      auto it = custom_fields.find(key);
      if (it == custom_fields.end()) return ScalarField::constant(dflt, grid.L);
      return parse_field_terms(it->second, grid.L);
    };
    return make_custom_family(get_field("c", 1.0), get_field("b", 0.0), get_field("h", 1.0),
                              get_field("m", 1.0), mu, grid.L, "custom");
  }
  return make_family(family_name, family_params, grid.L);
}

}  // namespace diraclab
