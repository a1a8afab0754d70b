#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "steer/kernel.hpp"
#include "steer/leader_follower.hpp"

namespace steer {

enum class Scenario {
    kUncontrolled,
    kFullControl,
    kSparseSingleAgent,
    kLeaderFollowerMicro,
    kLeaderFollowerHybrid,
};

const char* scenario_name(Scenario scenario);

/// Flat `key = value` text with dotted keys, `#` comments, UTF-8.
/// Keys are unique; redefining one is an error.
struct RawConfig {
    std::map<std::string, std::string> values;

    bool has(const std::string& key) const { return values.count(key) > 0; }
    void set(const std::string& key, std::string value) { values[key] = std::move(value); }
};

RawConfig parse_config_text(const std::string& text);
RawConfig parse_config_file(const std::filesystem::path& path);

/// Applies one `key=value` override (the CLI --set form).
void apply_override(RawConfig& raw, const std::string& assignment);

/// Fully resolved scenario description; every field has a value.
struct ScenarioConfig {
    Scenario scenario = Scenario::kUncontrolled;
    KernelSpec kernel;
    double k = -0.1;
    double c = 1.0;
    std::optional<std::size_t> pinned_agent;  // sparse scenario: fixed controlled index

    std::size_t n_agents = 50;      // microscopic population
    std::size_t n_particles = 10000;  // mean-field ensemble size
    std::size_t n_sample = 1000;    // MFMC subsample size
    std::size_t bins = 100;         // density histogram
    double range_lo = 0.0;
    double range_hi = 6.0;

    PopulationSplit split;                 // leader-follower scenarios
    std::vector<double> leader_x0;         // optional initial leader override

    double dt = 0.01;
    double horizon = 400.0;
    double init_lo = 2.0;
    double init_hi = 5.0;
    std::uint64_t seed = 12345;
    std::size_t record_stride = 10;
    std::string output_dir = "out";

    std::vector<std::string> warnings;  // non-fatal diagnostics gathered at resolve time

    bool is_leader_follower() const {
        return scenario == Scenario::kLeaderFollowerMicro ||
               scenario == Scenario::kLeaderFollowerHybrid;
    }
    bool is_mean_field() const {
        return scenario == Scenario::kLeaderFollowerHybrid ||
               (!is_leader_follower() && mean_field_model_);
    }
    bool has_control() const { return scenario != Scenario::kUncontrolled; }

    bool mean_field_model_ = false;  // resolved `model` key for single-population runs
};

/// Validates every key (errors name the offending key), fills defaults, and
/// derives rho_f/rho_l when only one is given.
ScenarioConfig resolve_config(const RawConfig& raw);

ScenarioConfig load_config(const std::filesystem::path& path);

/// The resolved configuration as flat keys; loading it back yields the same
/// scenario, which is what makes a run replayable from its manifest.
RawConfig to_raw(const ScenarioConfig& cfg);

}  // namespace steer
