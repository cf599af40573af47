#pragma once

#include <filesystem>

#include "diraclab/config.hpp"
#include "diraclab/io.hpp"

namespace diraclab {

struct RunOutcome {
  std::filesystem::path dir;
  json manifest;
  bool skipped = false;  // manifest hash matched a completed run
};

// Full pipeline for one configuration: reductions, decay verification,
// massive-hypothesis check, propagation, Moller limits for the requested
// directions, Cook acceleration, state diagnostics. Writes manifest.json,
// per-stage JSON reports and the binary covariance matrices into `outdir`.
// Deterministic for fixed config text + seed; re-running a completed
// directory is a no-op keyed on the config hash.
RunOutcome run_experiment(const Config& cfg, const std::filesystem::path& outdir);

// Every module's invariant suite on built-in families; returns the
// machine-readable summary ({id, module, pass, value, threshold} entries).
// `inject_gamma1_error` swaps in the broken Clifford fixture.
json verify_invariants(std::uint64_t seed = 1, bool inject_gamma1_error = false);

// Cartesian parameter sweep driven by a [sweep] section
// (entries like "family.mu = 0.5, 1.0, 1.5"). One subdirectory per point,
// resumable, CSV summary with one row per point.
json run_sweep(const Config& base, const std::filesystem::path& outdir, int workers,
               bool resume);

std::string sweep_csv(const json& sweep_summary);

}  // namespace diraclab
