#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diraclab/evolution.hpp"
#include "diraclab/geometry.hpp"

namespace diraclab {

// INI-style experiment configuration: [section] headers, key = value lines,
// '#' comments. Values stay strings until typed access.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Normalized text (sorted sections/keys) used for hashing and manifests.
  std::string canonical() const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct ExperimentConfig {
  std::string family_name = "flat";
  std::map<std::string, double> family_params;
  // custom family term tables (used when family_name == "custom")
  std::map<std::string, std::string> custom_fields;  // keys c, b, h, m
  double mu = 1.5;

  GridSpec grid;
  StepperConfig stepper;

  double T0 = 10.0;
  double schedule_factor = 2.0;
  std::string directions = "both";  // out | in | both
  int correction_order = 1;

  int symbol_n_min = 8;
  std::uint64_t seed = 1;

  static ExperimentConfig from(const Config& cfg);
  MetricFamily build_family() const;
};

// "amp [cos n | sin n] [* envelope]" term lists, ';'-separated; envelopes:
// const | invpow p | gauss tau | oddramp.
ScalarField parse_field_terms(const std::string& text, double L);

}  // namespace diraclab
