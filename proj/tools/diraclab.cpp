#include <CLI11.hpp>
#include <cstdlib>
#include <iostream>

#include "diraclab/harness.hpp"

namespace fs = std::filesystem;
using namespace diraclab;

namespace {

fs::path resolve_out(const std::string& out_flag, const std::string& fallback) {
  if (!out_flag.empty()) return out_flag;
  if (const char* env = std::getenv("DIRACLAB_OUT")) return fs::path(env) / fallback;
  return fs::path(fallback);
}

void apply_seed(Config& cfg, long long seed) {
  if (seed >= 0) cfg.set("diagnostics", "seed", std::to_string(seed));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diraclab: in/out vacuum construction for 1+1d Dirac fields"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed = -1;
  int workers = 1;
  bool resume = false;
  bool inject_gamma1 = false;

  auto* run = app.add_subcommand("run", "run one experiment configuration");
  run->add_option("--config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override diagnostics.seed");

  auto* verify = app.add_subcommand("verify", "run the module invariant suites");
  verify->add_option("--out", out_dir, "write the JSON report here");
  verify->add_option("--seed", seed, "random seed for the suites");
  verify->add_flag("--inject-gamma1-sign-error", inject_gamma1,
                   "mutation fixture: break one entry of gamma1");

  auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep");
  sweep->add_option("--config", config_path, "base config with a [sweep] section")->required();
  sweep->add_option("--out", out_dir, "sweep output directory");
  sweep->add_option("--workers", workers, "worker threads");
  sweep->add_flag("--resume", resume, "keep completed points");
  sweep->add_option("--seed", seed, "override diagnostics.seed");

  auto* report = app.add_subcommand("report", "summarise a finished run directory");
  report->add_option("--out", out_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      Config cfg = Config::load(config_path);
      apply_seed(cfg, seed);
      const RunOutcome rr = run_experiment(cfg, resolve_out(out_dir, "run"));
      std::cout << (rr.skipped ? "skipped (already complete): " : "complete: ")
                << rr.dir.string() << "\n"
                << "result_hash " << rr.manifest.value("result_hash", "") << "\n";
      return 0;
    }
    if (*verify) {
      const json summary =
          verify_invariants(seed >= 0 ? static_cast<std::uint64_t>(seed) : 1, inject_gamma1);
      for (const auto& entry : summary["checks"])
        std::cout << (entry["pass"].get<bool>() ? "PASS " : "FAIL ")
                  << entry["id"].get<std::string>() << " (value "
                  << entry["value"].dump() << ", threshold " << entry["threshold"].dump()
                  << ")\n";
      const int failures = summary["failures"].get<int>();
      std::cout << (failures == 0 ? "all invariants hold\n"
                                  : std::to_string(failures) + " invariant(s) failed\n");
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_json(fs::path(out_dir) / "verify.json", summary);
      }
      return failures == 0 ? 0 : 1;
    }
    if (*sweep) {
      Config cfg = Config::load(config_path);
      apply_seed(cfg, seed);
      const json summary = run_sweep(cfg, resolve_out(out_dir, "sweep"), workers, resume);
      int failed = 0;
      for (const auto& row : summary["points"])
        if (row.value("status", "") == "failed") ++failed;
      std::cout << summary["n_points"] << " point(s), " << failed << " failed; results in "
                << resolve_out(out_dir, "sweep").string() << "\n";
      return 0;
    }
    if (*report) {
      const fs::path dir(out_dir);
      const json manifest = read_json(dir / "manifest.json");
      std::cout << "run " << dir.string() << "\n"
                << "  family       " << manifest.value("family", "?") << "\n"
                << "  status       " << manifest.value("status", "?") << "\n"
                << "  result_hash  " << manifest.value("result_hash", "?") << "\n";
      for (const char* tag : {"out", "in"}) {
        const fs::path sp = dir / (std::string("scattering_") + tag + ".json");
        if (!fs::exists(sp)) continue;
        const json sj = read_json(sp);
        std::cout << "  " << tag << ": mu_hat " << sj["mu_hat"].dump() << ", tail bound "
                  << sj["tail_bound"].dump() << ", purity residual "
                  << sj["idempotency_residual"].dump() << " ("
                  << sj["extrapolation"].get<std::string>() << ")\n";
      }
      if (fs::exists(dir / "diagnostics.json")) {
        const json diag = read_json(dir / "diagnostics.json");
        if (diag.contains("hadamard_symbol"))
          std::cout << "  symbol slope " << diag["hadamard_symbol"].value("slope", json()).dump()
                    << ", smoothing slope "
                    << diag["smoothing_difference"].value("slope", json()).dump() << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
