#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "steer/config.hpp"
#include "steer/lyapunov.hpp"
#include "steer/rng.hpp"
#include "steer/spectral.hpp"

namespace steer {

/// n iid uniform draws in [lo, hi), one raw draw each, in index order.
std::vector<double> sample_initial(std::size_t n, double lo, double hi, Rng& rng);

/// What a finished run leaves behind, plus the in-memory series the tests
/// and the sweep comparison use.
struct RunResult {
    std::filesystem::path dir;
    LyapunovSeries lyapunov;  // the scenario's primary series (total for leader-follower)
    DecayCertificate certificate;
    double beta = 0.0;
    double initial_mean = 0.0;
    double final_mean = 0.0;
    std::optional<std::size_t> sparse_agent;
    double wall_seconds = 0.0;
    std::vector<std::string> outputs;  // file names written into dir
};

/// Runs the configured scenario and writes all artifacts into `out_dir`
/// (cfg.output_dir for the single-argument form): trajectory or density
/// CSV, diagnostics/moments CSV, lyapunov CSV (envelope column when the
/// decay rate is negative), certificate.json, manifest.json and
/// resolved.cfg.
RunResult run_scenario(const ScenarioConfig& cfg);
RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct SweepResult {
    std::filesystem::path dir;
    std::vector<RunResult> runs;
};

/// Re-resolves the raw config once per value for `key`, runs each entry
/// with the shared seed into dir/value_<i>, and writes the comparison CSV
/// `sweep.csv` with columns t, value_1..value_n holding the primary
/// Lyapunov series. All entries must share the recorded time grid.
SweepResult run_sweep(const RawConfig& base, const std::string& key,
                      const std::vector<std::string>& values);
SweepResult run_sweep(const RawConfig& base, const std::string& key,
                      const std::vector<std::string>& values,
                      const std::filesystem::path& out_dir);

/// Spectral analysis of the microscopic linearization behind the configured
/// scenario: B = 0 (uncontrolled), B = 1 (full control), B = e_j (sparse;
/// the drawn index reproduces the simulate draw order), or the 0/1 leader
/// indicator (leader-follower).
SpectralReport analyze_scenario(const ScenarioConfig& cfg);

std::string spectral_report_json(const SpectralReport& report);

}  // namespace steer
