// steersim: run, analyze and sweep the consensus-control scenarios.
//
// Exit codes: 0 success, 1 validation error, 2 runtime blow-up, 3 I/O error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "steer/config.hpp"
#include "steer/csv.hpp"
#include "steer/errors.hpp"
#include "steer/scenario.hpp"
#include "steer/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitBlowup = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> overrides;
};

steer::ScenarioConfig load(const CommonArgs& args, steer::RawConfig* raw_out = nullptr) {
    steer::RawConfig raw = steer::parse_config_file(args.config_path);
    for (const std::string& assignment : args.overrides) {
        steer::apply_override(raw, assignment);
    }
    if (args.seed) raw.set("seed", std::to_string(*args.seed));
    if (args.out_dir) raw.set("output_dir", *args.out_dir);
    steer::ScenarioConfig cfg = steer::resolve_config(raw);
    for (const std::string& warning : cfg.warnings) {
        std::cerr << "steersim: warning: " << warning << '\n';
    }
    if (raw_out) *raw_out = std::move(raw);
    return cfg;
}

std::vector<std::string> split_values(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int run_simulate(const CommonArgs& args) {
    const steer::ScenarioConfig cfg = load(args);
    const steer::RunResult result = steer::run_scenario(cfg);
    std::cout << "scenario " << steer::scenario_name(cfg.scenario) << " finished in "
              << steer::format_double(result.wall_seconds) << " s\n"
              << "  outputs: " << result.dir.string() << '\n'
              << "  lyapunov: initial " << steer::format_double(result.lyapunov.values.front())
              << ", final " << steer::format_double(result.lyapunov.values.back()) << '\n';
    if (result.beta < 0.0) {
        std::cout << "  decay rate beta = " << steer::format_double(result.beta)
                  << (result.certificate.envelope_ok ? " (envelope satisfied)"
                                                     : " (envelope violated)")
                  << '\n';
    }
    return kExitOk;
}

int run_analyze(const CommonArgs& args) {
    const steer::ScenarioConfig cfg = load(args);
    const steer::SpectralReport report = steer::analyze_scenario(cfg);
    std::cout << steer::spectral_report_json(report) << '\n';
    return kExitOk;
}

int run_sweep_cmd(const CommonArgs& args, const std::string& key, const std::string& values_csv) {
    steer::RawConfig raw;
    load(args, &raw);
    const std::vector<std::string> values = split_values(values_csv);
    const steer::SweepResult sweep = steer::run_sweep(raw, key, values);
    std::cout << "sweep over " << key << " with " << sweep.runs.size() << " runs\n"
              << "  comparison CSV: " << (sweep.dir / "sweep.csv").string() << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sparse consensus-control simulation harness"};
    app.set_version_flag("--version", steer::kVersion);
    app.require_subcommand(1);

    CommonArgs args;
    const auto add_common = [&args](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "scenario config file")->required();
        cmd->add_option("--seed", args.seed, "override the RNG seed");
        cmd->add_option("--out", args.out_dir, "override the output directory");
        cmd->add_option("--set", args.overrides, "override a config key (key=value), repeatable");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario and write artifacts");
    add_common(simulate);

    CLI::App* analyze = app.add_subcommand("analyze", "print the spectral report as JSON");
    add_common(analyze);

    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario once per value of a config key");
    add_common(sweep);
    std::string sweep_key;
    std::string sweep_values;
    sweep->add_option("--key", sweep_key, "config key to sweep")->required();
    sweep->add_option("--values", sweep_values, "comma-separated values")->required();

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return run_simulate(args);
        if (analyze->parsed()) return run_analyze(args);
        if (sweep->parsed()) return run_sweep_cmd(args, sweep_key, sweep_values);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const steer::BlowupError& e) {
        std::cerr << "steersim: blow-up: " << e.what() << '\n';
        return kExitBlowup;
    } catch (const steer::IoError& e) {
        std::cerr << "steersim: i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const steer::ValidationError& e) {
        std::cerr << "steersim: invalid configuration: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "steersim: error: " << e.what() << '\n';
        return kExitValidation;
    }
}
