// Experiment runner: interprets a self-describing JSON config (the encoded
// machine description plus run parameters) and writes per-seed trace CSVs and
// JSON reports.
//
// Exit codes: 0 success, 1 threshold violation, 2 configuration error,
// 3 runtime/oracle error.

#include <cstdio>
#include <string>

#include "CLI11.hpp"

#include "etm/etm.hpp"

int main(int argc, char** argv) {
  CLI::App app{"evolutionary-machine experiment runner"};
  std::string config_path;
  std::string out_override;
  std::string seeds_override;
  bool pilot = false;
  app.add_option("config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_override, "output directory (overrides the config)");
  app.add_option("--seeds", seeds_override, "seed override: N, a,b,c or a..b");
  app.add_flag("--pilot", pilot, "theorem-check: regenerate the thresholds fixtures");
  CLI11_PARSE(app, argc, argv);

  try {
    etm::RunOverrides overrides;
    if (!out_override.empty()) overrides.out = out_override;
    if (!seeds_override.empty()) overrides.seeds = etm::parse_seed_spec(seeds_override);
    overrides.pilot = pilot;
    return etm::run_experiment(config_path, overrides);
  } catch (const etm::DecodeError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return etm::kExitConfigError;
  } catch (const etm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return etm::kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return etm::kExitRuntimeError;
  }
}
