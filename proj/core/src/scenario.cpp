#include "steer/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "steer/csv.hpp"
#include "steer/errors.hpp"
#include "steer/leader_follower.hpp"
#include "steer/meanfield.hpp"
#include "steer/micro.hpp"
#include "steer/version.hpp"

namespace steer {

namespace {

using ordered_json = nlohmann::ordered_json;

double mean_of(std::span<const double> xs) {
    double sum = 0.0;
    for (const double x : xs) sum += x;
    return (1.0 / static_cast<double>(xs.size())) * sum;
}

/// Record at step 0, every `stride` steps, and always at the final step.
struct RecordPlan {
    std::size_t stride;
    std::size_t last;
    bool wants(std::size_t step) const { return step % stride == 0 || step == last; }
};

std::vector<std::string> position_columns(const std::string& prefix, std::size_t n) {
    std::vector<std::string> cols{"t"};
    cols.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) cols.push_back(prefix + std::to_string(i));
    return cols;
}

std::vector<std::string> density_columns(std::size_t bins) {
    std::vector<std::string> cols{"t"};
    for (std::size_t b = 0; b < bins; ++b) cols.push_back("bin_" + std::to_string(b));
    cols.push_back("overflow");
    return cols;
}

ordered_json raw_to_json(const RawConfig& raw) {
    ordered_json obj = ordered_json::object();
    for (const auto& [key, value] : raw.values) obj[key] = value;
    return obj;
}

void write_json(const std::filesystem::path& path, const ordered_json& value) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << value.dump(2) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

void write_resolved_cfg(const std::filesystem::path& path, const RawConfig& raw) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& [key, value] : raw.values) out << key << " = " << value << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<double> make_actuation(Scenario scenario, std::size_t population,
                                   std::optional<std::size_t> sparse_agent) {
    if (scenario == Scenario::kFullControl) return {};  // empty = everyone actuated
    std::vector<double> b(population, 0.0);
    b.at(*sparse_agent) = 1.0;
    return b;
}

struct ScenarioContext {
    const ScenarioConfig& cfg;
    std::filesystem::path dir;
    RunResult result;

    void note_output(const std::string& name) { result.outputs.push_back(name); }
};

void run_single_population_micro(ScenarioContext& ctx, Rng& rng) {
    const ScenarioConfig& cfg = ctx.cfg;
    AgentState state{sample_initial(cfg.n_agents, cfg.init_lo, cfg.init_hi, rng), 0.0};
    ctx.result.initial_mean = mean_of(state.positions);

    std::optional<ControlConfig> control;
    if (cfg.has_control()) {
        if (cfg.scenario == Scenario::kSparseSingleAgent) {
            ctx.result.sparse_agent = cfg.pinned_agent ? *cfg.pinned_agent
                                                       : rng.pick_index(cfg.n_agents);
        }
        control = ControlConfig{cfg.k, cfg.c,
                                make_actuation(cfg.scenario, cfg.n_agents, ctx.result.sparse_agent)};
    }

    CsvWriter trajectory(ctx.dir / "trajectory.csv", position_columns("x_", cfg.n_agents));
    ctx.note_output("trajectory.csv");
    const std::vector<std::string> diag_cols{"t", "lyapunov", "mean", "control_u"};
    CsvWriter diagnostics(ctx.dir / "diagnostics.csv", diag_cols);
    ctx.note_output("diagnostics.csv");

    ctx.result.lyapunov.kind = LyapunovKind::kMicro;
    const RecordPlan plan{cfg.record_stride, step_count(cfg.horizon, cfg.dt)};
    std::vector<double> row(cfg.n_agents + 1);

    const MicroObserver observer = [&](std::size_t step, const AgentState& s) {
        if (!plan.wants(step)) return;
        row[0] = s.time;
        for (std::size_t i = 0; i < s.positions.size(); ++i) row[i + 1] = s.positions[i];
        trajectory.write_row(row);
        const double lyap = lyap_micro(s, cfg.c);
        const double mean = mean_of(s.positions);
        const double u = control ? feedback(s, *control) : 0.0;
        diagnostics.write_row(std::vector<double>{s.time, lyap, mean, u});
        ctx.result.lyapunov.times.push_back(s.time);
        ctx.result.lyapunov.values.push_back(lyap);
    };

    const AgentState final_state =
        run_micro(std::move(state), cfg.horizon, cfg.dt, cfg.kernel,
                  control ? &*control : nullptr, observer);
    ctx.result.final_mean = mean_of(final_state.positions);
    trajectory.close();
    diagnostics.close();
}

void run_single_population_meanfield(ScenarioContext& ctx, Rng& rng) {
    const ScenarioConfig& cfg = ctx.cfg;
    ParticleEnsemble ensemble;
    ensemble.particles = sample_initial(cfg.n_particles, cfg.init_lo, cfg.init_hi, rng);
    ensemble.weight = 1.0 / static_cast<double>(cfg.n_particles);
    ctx.result.initial_mean = mean_of(ensemble.particles);

    std::optional<ControlConfig> control;
    if (cfg.has_control()) {
        if (cfg.scenario == Scenario::kSparseSingleAgent) {
            ctx.result.sparse_agent = cfg.pinned_agent ? *cfg.pinned_agent
                                                       : rng.pick_index(cfg.n_particles);
        }
        control = ControlConfig{cfg.k, cfg.c,
                                make_actuation(cfg.scenario, cfg.n_particles,
                                               ctx.result.sparse_agent)};
    }

    CsvWriter density(ctx.dir / "density.csv", density_columns(cfg.bins));
    ctx.note_output("density.csv");
    const std::vector<std::string> moment_cols{"t", "m1", "lyapunov"};
    CsvWriter moments(ctx.dir / "moments.csv", moment_cols);
    ctx.note_output("moments.csv");

    ctx.result.lyapunov.kind = LyapunovKind::kMeanField;
    const RecordPlan plan{cfg.record_stride, step_count(cfg.horizon, cfg.dt)};
    std::vector<double> density_row(cfg.bins + 2);

    const EnsembleObserver observer = [&](std::size_t step, const ParticleEnsemble& e) {
        if (!plan.wants(step)) return;
        const HistogramResult hist = histogram(e, cfg.range_lo, cfg.range_hi, cfg.bins);
        density_row[0] = e.time;
        for (std::size_t b = 0; b < cfg.bins; ++b) density_row[b + 1] = hist.bin_mass[b];
        density_row[cfg.bins + 1] = hist.overflow;
        density.write_row(density_row);
        const double lyap = lyap_ensemble(e, cfg.c);
        moments.write_row(std::vector<double>{e.time, first_moment(e), lyap});
        ctx.result.lyapunov.times.push_back(e.time);
        ctx.result.lyapunov.values.push_back(lyap);
    };

    const ParticleEnsemble final_state =
        run_meanfield(std::move(ensemble), cfg.horizon, cfg.dt, cfg.kernel,
                      control ? &*control : nullptr, MfmcConfig{cfg.n_sample}, rng, observer);
    ctx.result.final_mean = mean_of(final_state.particles);
    density.close();
    moments.close();
}

void run_leader_follower_micro(ScenarioContext& ctx, Rng& rng) {
    const ScenarioConfig& cfg = ctx.cfg;
    const PopulationSplit& split = cfg.split;
    MicroLfState state;
    state.followers = sample_initial(split.n_followers, cfg.init_lo, cfg.init_hi, rng);
    state.leaders = cfg.leader_x0.empty()
                        ? sample_initial(split.n_leaders, cfg.init_lo, cfg.init_hi, rng)
                        : cfg.leader_x0;

    const double wf = split.omega_f();
    const double wl = split.omega_l();
    ctx.result.initial_mean =
        wf * deviation_sum(state.followers, 0.0) + wl * deviation_sum(state.leaders, 0.0);
    ctx.result.beta = decay_rate_micro(cfg.kernel.p_bar, cfg.k, wf, wl);

    CsvWriter trajectory(ctx.dir / "trajectory.csv", position_columns("x_", split.n_followers));
    ctx.note_output("trajectory.csv");
    CsvWriter leaders_csv(ctx.dir / "leaders.csv", position_columns("xl_", split.n_leaders));
    ctx.note_output("leaders.csv");
    const std::vector<std::string> comp_cols{"t", "follower", "leader"};
    CsvWriter components(ctx.dir / "lyapunov_components.csv", comp_cols);
    ctx.note_output("lyapunov_components.csv");

    ctx.result.lyapunov.kind = LyapunovKind::kTotalLF;
    const RecordPlan plan{cfg.record_stride, step_count(cfg.horizon, cfg.dt)};
    std::vector<double> follower_row(split.n_followers + 1);
    std::vector<double> leader_row(split.n_leaders + 1);

    const LfObserver observer = [&](std::size_t step, std::span<const double> followers,
                                    std::span<const double> leaders, double time) {
        if (!plan.wants(step)) return;
        follower_row[0] = time;
        for (std::size_t i = 0; i < followers.size(); ++i) follower_row[i + 1] = followers[i];
        trajectory.write_row(follower_row);
        leader_row[0] = time;
        for (std::size_t i = 0; i < leaders.size(); ++i) leader_row[i + 1] = leaders[i];
        leaders_csv.write_row(leader_row);
        const double lf = wf * squared_deviation_sum(followers, cfg.c);
        const double ll = lyap_leaders(leaders, wl, cfg.c);
        components.write_row(std::vector<double>{time, lf, ll});
        ctx.result.lyapunov.times.push_back(time);
        ctx.result.lyapunov.values.push_back(lf + ll);
    };

    const MicroLfState final_state = run_micro_lf(std::move(state), split, cfg.kernel, cfg.k,
                                                  cfg.c, cfg.horizon, cfg.dt, observer);
    ctx.result.final_mean =
        wf * deviation_sum(final_state.followers, 0.0) + wl * deviation_sum(final_state.leaders, 0.0);
    trajectory.close();
    leaders_csv.close();
    components.close();
}

void run_leader_follower_hybrid(ScenarioContext& ctx, Rng& rng) {
    const ScenarioConfig& cfg = ctx.cfg;
    const PopulationSplit& split = cfg.split;
    HybridState state;
    state.followers.particles = sample_initial(split.n_followers, cfg.init_lo, cfg.init_hi, rng);
    state.followers.weight = split.omega_f();
    state.leaders = cfg.leader_x0.empty()
                        ? sample_initial(split.n_leaders, cfg.init_lo, cfg.init_hi, rng)
                        : cfg.leader_x0;

    const double wl = split.omega_l();
    ctx.result.initial_mean = first_moment(state.followers) + wl * deviation_sum(state.leaders, 0.0);
    ctx.result.beta = decay_rate_hybrid(cfg.kernel.p_bar, cfg.k);

    CsvWriter density(ctx.dir / "density.csv", density_columns(cfg.bins));
    ctx.note_output("density.csv");
    const std::vector<std::string> moment_cols{"t", "m1", "lyapunov"};
    CsvWriter moments(ctx.dir / "moments.csv", moment_cols);
    ctx.note_output("moments.csv");
    CsvWriter leaders_csv(ctx.dir / "leaders.csv", position_columns("xl_", split.n_leaders));
    ctx.note_output("leaders.csv");
    const std::vector<std::string> comp_cols{"t", "follower", "leader"};
    CsvWriter components(ctx.dir / "lyapunov_components.csv", comp_cols);
    ctx.note_output("lyapunov_components.csv");

    ctx.result.lyapunov.kind = LyapunovKind::kTotalLF;
    const RecordPlan plan{cfg.record_stride, step_count(cfg.horizon, cfg.dt)};
    std::vector<double> density_row(cfg.bins + 2);
    std::vector<double> leader_row(split.n_leaders + 1);

    const HybridObserver observer = [&](std::size_t step, const HybridState& s) {
        if (!plan.wants(step)) return;
        const HistogramResult hist = histogram(s.followers, cfg.range_lo, cfg.range_hi, cfg.bins);
        density_row[0] = s.time;
        for (std::size_t b = 0; b < cfg.bins; ++b) density_row[b + 1] = hist.bin_mass[b];
        density_row[cfg.bins + 1] = hist.overflow;
        density.write_row(density_row);
        const double lf = lyap_ensemble(s.followers, cfg.c);
        const double ll = lyap_leaders(s.leaders, wl, cfg.c);
        moments.write_row(std::vector<double>{s.time, first_moment(s.followers), lf + ll});
        leader_row[0] = s.time;
        for (std::size_t i = 0; i < s.leaders.size(); ++i) leader_row[i + 1] = s.leaders[i];
        leaders_csv.write_row(leader_row);
        components.write_row(std::vector<double>{s.time, lf, ll});
        ctx.result.lyapunov.times.push_back(s.time);
        ctx.result.lyapunov.values.push_back(lf + ll);
    };

    const HybridState final_state =
        run_hybrid(std::move(state), split, cfg.kernel, cfg.k, cfg.c, MfmcConfig{cfg.n_sample},
                   rng, cfg.horizon, cfg.dt, observer);
    ctx.result.final_mean =
        first_moment(final_state.followers) + wl * deviation_sum(final_state.leaders, 0.0);
    density.close();
    moments.close();
    leaders_csv.close();
    components.close();
}

}  // namespace

std::vector<double> sample_initial(std::size_t n, double lo, double hi, Rng& rng) {
    if (n == 0) throw ValidationError("sample_initial: need n >= 1");
    if (!(lo < hi)) throw ValidationError("sample_initial: need lo < hi");
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = rng.uniform(lo, hi);
    return xs;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    return run_scenario(cfg, cfg.output_dir);
}

RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    const auto start = std::chrono::steady_clock::now();

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    ScenarioContext ctx{cfg, out_dir, {}};
    ctx.result.dir = out_dir;

    Rng rng(cfg.seed);
    switch (cfg.scenario) {
        case Scenario::kUncontrolled:
        case Scenario::kFullControl:
        case Scenario::kSparseSingleAgent:
            if (cfg.mean_field_model_) {
                run_single_population_meanfield(ctx, rng);
            } else {
                run_single_population_micro(ctx, rng);
            }
            break;
        case Scenario::kLeaderFollowerMicro:
            run_leader_follower_micro(ctx, rng);
            break;
        case Scenario::kLeaderFollowerHybrid:
            run_leader_follower_hybrid(ctx, rng);
            break;
    }

    RunResult& result = ctx.result;
    result.certificate = certify(result.lyapunov, result.beta);

    // Lyapunov CSV, with the exponential reference column when decay is
    // actually certified by a negative rate.
    {
        const bool with_envelope = result.beta < 0.0;
        std::vector<std::string> cols{"t", "value"};
        if (with_envelope) cols.push_back("envelope");
        CsvWriter lyap_csv(out_dir / "lyapunov.csv", cols);
        ctx.note_output("lyapunov.csv");
        std::vector<double> env;
        if (with_envelope) {
            env = decay_envelope(result.lyapunov.values.front(), result.beta,
                                 result.lyapunov.times);
        }
        for (std::size_t i = 0; i < result.lyapunov.times.size(); ++i) {
            if (with_envelope) {
                lyap_csv.write_row(std::vector<double>{result.lyapunov.times[i],
                                                       result.lyapunov.values[i], env[i]});
            } else {
                lyap_csv.write_row(
                    std::vector<double>{result.lyapunov.times[i], result.lyapunov.values[i]});
            }
        }
        lyap_csv.close();
    }

    ordered_json certificate{{"beta", result.certificate.beta},
                             {"monotone_ok", result.certificate.monotone_ok},
                             {"envelope_ok", result.certificate.envelope_ok},
                             {"max_violation", result.certificate.max_violation}};
    write_json(out_dir / "certificate.json", certificate);
    ctx.note_output("certificate.json");

    const RawConfig resolved = to_raw(cfg);
    write_resolved_cfg(out_dir / "resolved.cfg", resolved);
    ctx.note_output("resolved.cfg");

    const auto stop = std::chrono::steady_clock::now();
    result.wall_seconds = std::chrono::duration<double>(stop - start).count();

    ordered_json manifest;
    manifest["scenario"] = scenario_name(cfg.scenario);
    manifest["seed"] = cfg.seed;
    manifest["resolved_config"] = raw_to_json(resolved);
    if (result.sparse_agent) manifest["sparse_agent_index"] = *result.sparse_agent;
    manifest["lyapunov_kind"] = lyapunov_kind_name(result.lyapunov.kind);
    manifest["beta"] = result.beta;
    manifest["warnings"] = cfg.warnings;
    manifest["versions"] =
        ordered_json{{"steer", kVersion}, {"compiler", __VERSION__}};
    manifest["wall_time_seconds"] = result.wall_seconds;
    manifest["outputs"] = result.outputs;
    write_json(out_dir / "manifest.json", manifest);

    return result;
}

SweepResult run_sweep(const RawConfig& base, const std::string& key,
                      const std::vector<std::string>& values) {
    const ScenarioConfig base_cfg = resolve_config(base);
    return run_sweep(base, key, values, base_cfg.output_dir);
}

SweepResult run_sweep(const RawConfig& base, const std::string& key,
                      const std::vector<std::string>& values,
                      const std::filesystem::path& out_dir) {
    if (values.empty()) throw ValidationError("sweep: empty value list");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    SweepResult sweep;
    sweep.dir = out_dir;
    for (std::size_t i = 0; i < values.size(); ++i) {
        RawConfig raw = base;
        apply_override(raw, key + "=" + values[i]);
        const ScenarioConfig cfg = resolve_config(raw);  // unknown keys rejected here
        const std::filesystem::path sub = out_dir / ("value_" + std::to_string(i + 1));
        sweep.runs.push_back(run_scenario(cfg, sub));
        if (!sweep.runs.back().lyapunov.times.empty() &&
            sweep.runs.back().lyapunov.times.size() != sweep.runs.front().lyapunov.times.size()) {
            throw ValidationError("sweep over \"" + key +
                                  "\" changes the recorded time grid; comparison CSV "
                                  "requires matching grids");
        }
    }

    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < values.size(); ++i) cols.push_back("value_" + std::to_string(i + 1));
    CsvWriter comparison(out_dir / "sweep.csv", cols);
    const std::size_t rows = sweep.runs.front().lyapunov.times.size();
    std::vector<double> row(values.size() + 1);
    for (std::size_t r = 0; r < rows; ++r) {
        row[0] = sweep.runs.front().lyapunov.times[r];
        for (std::size_t i = 0; i < values.size(); ++i) {
            row[i + 1] = sweep.runs[i].lyapunov.values[r];
        }
        comparison.write_row(row);
    }
    comparison.close();

    ordered_json manifest;
    manifest["key"] = key;
    manifest["values"] = values;
    ordered_json dirs = ordered_json::array();
    for (const RunResult& run : sweep.runs) dirs.push_back(run.dir.filename().string());
    manifest["directories"] = dirs;
    write_json(out_dir / "sweep_manifest.json", manifest);
    return sweep;
}

SpectralReport analyze_scenario(const ScenarioConfig& cfg) {
    std::size_t n = 0;
    std::vector<double> b;
    switch (cfg.scenario) {
        case Scenario::kUncontrolled:
            n = cfg.n_agents;
            b.assign(n, 0.0);
            break;
        case Scenario::kFullControl:
            n = cfg.n_agents;
            b.assign(n, 1.0);
            break;
        case Scenario::kSparseSingleAgent: {
            n = cfg.mean_field_model_ ? cfg.n_particles : cfg.n_agents;
            b.assign(n, 0.0);
            std::size_t agent = 0;
            if (cfg.pinned_agent) {
                agent = *cfg.pinned_agent;
            } else {
                // Reproduce the simulate draw order: n position draws, then
                // the controlled-agent index.
                Rng rng(cfg.seed);
                for (std::size_t i = 0; i < n; ++i) rng.raw();
                agent = rng.pick_index(n);
            }
            b.at(agent) = 1.0;
            break;
        }
        case Scenario::kLeaderFollowerMicro:
        case Scenario::kLeaderFollowerHybrid:
            n = cfg.split.n_followers + cfg.split.n_leaders;
            b.assign(n, 0.0);
            for (std::size_t i = cfg.split.n_followers; i < n; ++i) b[i] = 1.0;
            break;
    }
    if (n < 2) throw ValidationError("analyze needs a population of at least 2");
    constexpr std::size_t kDenseLimit = 4000;
    if (n > kDenseLimit) {
        throw ValidationError("analyze verifies dense matrices and caps the population at " +
                              std::to_string(kDenseLimit) + "; configured system has " +
                              std::to_string(n));
    }
    const double k = cfg.has_control() ? cfg.k : 0.0;
    return analytic_spectrum(n, cfg.kernel.p_bar, b, k);
}

std::string spectral_report_json(const SpectralReport& report) {
    ordered_json obj;
    obj["n"] = report.n;
    obj["p_bar"] = report.p_bar;
    obj["k"] = report.k;
    obj["lambda1_closed"] = report.lambda1_closed;
    obj["stabilizable"] = report.stabilizable;
    obj["asymptotically_stable"] = report.asymptotically_stable;
    obj["max_residual"] = report.max_residual;
    obj["residuals_ok"] = report.residuals_ok;
    obj["residual_tolerance"] = SpectralReport::residual_tolerance;
    obj["laplacian_eigenvalues"] = report.laplacian_eigenvalues;
    obj["closed_loop_eigenvalues"] = report.closed_loop_eigenvalues;
    return obj.dump(2);
}

}  // namespace steer
