#include "steer/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "steer/csv.hpp"
#include "steer/errors.hpp"
#include "steer/micro.hpp"

namespace steer {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("key \"" + key + "\": cannot parse \"" + text + "\" as a real number");
    }
    return value;
}

std::size_t parse_size(const std::string& key, const std::string& text, std::size_t min_value) {
    const std::string t = trim(text);
    unsigned long long value = 0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError("key \"" + key + "\": cannot parse \"" + text +
                              "\" as a nonnegative integer");
    }
    if (value < min_value) {
        throw ValidationError("key \"" + key + "\": value must be >= " + std::to_string(min_value));
    }
    return static_cast<std::size_t>(value);
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    return static_cast<std::uint64_t>(parse_size(key, text, 0));
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw ValidationError("key \"" + key + "\": empty list");
    return out;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "scenario", "model", "lf.mode",
        "kernel.family", "kernel.p_bar",
        "control.k", "control.c", "control.agent",
        "n_agents",
        "mfmc.n_particles", "mfmc.n_sample", "mfmc.seed", "mfmc.bins",
        "mfmc.range_lo", "mfmc.range_hi",
        "lf.n_followers", "lf.n_leaders", "lf.rho_f", "lf.rho_l", "lf.leader_x0",
        "dt", "horizon", "seed", "record_stride", "output_dir",
        "init.lo", "init.hi",
    };
    return keys;
}

bool valid_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

}  // namespace

const char* scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::kUncontrolled: return "uncontrolled";
        case Scenario::kFullControl: return "full_control";
        case Scenario::kSparseSingleAgent: return "sparse_single_agent";
        case Scenario::kLeaderFollowerMicro: return "leader_follower_micro";
        case Scenario::kLeaderFollowerHybrid: return "leader_follower_hybrid";
    }
    return "unknown";
}

RawConfig parse_config_text(const std::string& text) {
    RawConfig raw;
    std::stringstream stream(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string entry = trim(line);
        if (entry.empty()) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(lineno) +
                                  ": expected key = value, got \"" + entry + "\"");
        }
        const std::string key = trim(entry.substr(0, eq));
        const std::string value = trim(entry.substr(eq + 1));
        if (key.empty() || !std::all_of(key.begin(), key.end(), valid_key_char)) {
            throw ValidationError("config line " + std::to_string(lineno) + ": bad key \"" + key +
                                  "\"");
        }
        if (value.empty()) {
            throw ValidationError("config line " + std::to_string(lineno) + ": key \"" + key +
                                  "\" has an empty value");
        }
        if (raw.has(key)) {
            throw ValidationError("config line " + std::to_string(lineno) + ": key \"" + key +
                                  "\" redefined");
        }
        raw.set(key, value);
    }
    return raw;
}

RawConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("override \"" + assignment + "\": expected key=value");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty() || value.empty()) {
        throw ValidationError("override \"" + assignment + "\": expected key=value");
    }
    raw.values[key] = value;  // overrides may replace file-provided keys
}

ScenarioConfig resolve_config(const RawConfig& raw) {
    for (const auto& [key, value] : raw.values) {
        if (!known_keys().count(key)) {
            throw ValidationError("unknown config key \"" + key + "\"");
        }
    }

    ScenarioConfig cfg;
    const auto get = [&raw](const char* key) -> const std::string* {
        const auto it = raw.values.find(key);
        return it == raw.values.end() ? nullptr : &it->second;
    };

    const std::string* scenario_text = get("scenario");
    if (!scenario_text) throw ValidationError("key \"scenario\" is required");

    bool lf = false;
    if (*scenario_text == "uncontrolled") {
        cfg.scenario = Scenario::kUncontrolled;
    } else if (*scenario_text == "full_control") {
        cfg.scenario = Scenario::kFullControl;
    } else if (*scenario_text == "sparse_single_agent") {
        cfg.scenario = Scenario::kSparseSingleAgent;
    } else if (*scenario_text == "leader_follower") {
        lf = true;
    } else {
        throw ValidationError(
            "key \"scenario\": expected one of uncontrolled, full_control, "
            "sparse_single_agent, leader_follower; got \"" +
            *scenario_text + "\"");
    }

    if (lf) {
        std::string mode = "micro";
        if (const std::string* m = get("lf.mode")) mode = *m;
        if (mode == "micro") {
            cfg.scenario = Scenario::kLeaderFollowerMicro;
        } else if (mode == "hybrid") {
            cfg.scenario = Scenario::kLeaderFollowerHybrid;
        } else {
            throw ValidationError("key \"lf.mode\": expected micro or hybrid, got \"" + mode + "\"");
        }
        if (get("model")) {
            throw ValidationError("key \"model\" does not apply to leader_follower (use lf.mode)");
        }
    } else {
        if (get("lf.mode")) {
            throw ValidationError("key \"lf.mode\" applies only to scenario = leader_follower");
        }
        std::string model = "micro";
        if (const std::string* m = get("model")) model = *m;
        if (model == "micro") {
            cfg.mean_field_model_ = false;
        } else if (model == "meanfield") {
            cfg.mean_field_model_ = true;
        } else {
            throw ValidationError("key \"model\": expected micro or meanfield, got \"" + model +
                                  "\"");
        }
    }

    KernelFamily family = KernelFamily::kRationalDecay;
    if (const std::string* f = get("kernel.family")) family = parse_kernel_family(*f);
    double p_bar = 0.04;
    if (const std::string* p = get("kernel.p_bar")) p_bar = parse_double("kernel.p_bar", *p);
    if (!(p_bar > 0.0) || !std::isfinite(p_bar)) {
        throw ValidationError("key \"kernel.p_bar\": must be a positive finite real");
    }
    cfg.kernel = KernelSpec{family, p_bar};

    if (const std::string* v = get("control.k")) cfg.k = parse_double("control.k", *v);
    if (const std::string* v = get("control.c")) cfg.c = parse_double("control.c", *v);
    if (!std::isfinite(cfg.k)) throw ValidationError("key \"control.k\": must be finite");
    if (!std::isfinite(cfg.c)) throw ValidationError("key \"control.c\": must be finite");

    if (const std::string* v = get("n_agents")) cfg.n_agents = parse_size("n_agents", *v, 1);
    if (const std::string* v = get("mfmc.n_particles")) {
        cfg.n_particles = parse_size("mfmc.n_particles", *v, 1);
    }
    if (const std::string* v = get("mfmc.n_sample")) {
        cfg.n_sample = parse_size("mfmc.n_sample", *v, 1);
    }
    if (const std::string* v = get("mfmc.bins")) cfg.bins = parse_size("mfmc.bins", *v, 1);
    if (const std::string* v = get("mfmc.range_lo")) {
        cfg.range_lo = parse_double("mfmc.range_lo", *v);
    }
    if (const std::string* v = get("mfmc.range_hi")) {
        cfg.range_hi = parse_double("mfmc.range_hi", *v);
    }
    if (!(cfg.range_lo < cfg.range_hi)) {
        throw ValidationError("key \"mfmc.range_lo\": histogram range must satisfy lo < hi");
    }

    if (const std::string* v = get("dt")) cfg.dt = parse_double("dt", *v);
    if (!(cfg.dt > 0.0)) throw ValidationError("key \"dt\": must be positive");
    if (const std::string* v = get("horizon")) cfg.horizon = parse_double("horizon", *v);
    if (!(cfg.horizon > 0.0)) throw ValidationError("key \"horizon\": must be positive");
    if (std::llround(cfg.horizon / cfg.dt) < 1) {
        throw ValidationError("key \"horizon\": shorter than one time step");
    }
    if (const std::string* v = get("record_stride")) {
        cfg.record_stride = parse_size("record_stride", *v, 1);
    }
    if (const std::string* v = get("output_dir")) cfg.output_dir = *v;

    if (const std::string* v = get("init.lo")) cfg.init_lo = parse_double("init.lo", *v);
    if (const std::string* v = get("init.hi")) cfg.init_hi = parse_double("init.hi", *v);
    if (!(cfg.init_lo < cfg.init_hi)) {
        throw ValidationError("key \"init.lo\": initial interval must satisfy lo < hi");
    }

    const std::string* seed_key = get("seed");
    const std::string* mfmc_seed_key = get("mfmc.seed");
    if (seed_key) {
        cfg.seed = parse_u64("seed", *seed_key);
        if (mfmc_seed_key) {
            cfg.warnings.push_back("mfmc.seed ignored because seed is set");
        }
    } else if (mfmc_seed_key) {
        cfg.seed = parse_u64("mfmc.seed", *mfmc_seed_key);
    }

    if (lf) {
        PopulationSplit split;
        split.n_followers = cfg.scenario == Scenario::kLeaderFollowerHybrid ? 9999 : 49;
        if (const std::string* v = get("lf.n_followers")) {
            split.n_followers = parse_size("lf.n_followers", *v, 1);
        }
        split.n_leaders = 1;
        if (const std::string* v = get("lf.n_leaders")) {
            split.n_leaders = parse_size("lf.n_leaders", *v, 1);
        }
        const std::string* rf = get("lf.rho_f");
        const std::string* rl = get("lf.rho_l");
        if (rf && rl) {
            split.rho_f = parse_double("lf.rho_f", *rf);
            split.rho_l = parse_double("lf.rho_l", *rl);
        } else if (rf) {
            split.rho_f = parse_double("lf.rho_f", *rf);
            split.rho_l = 1.0 - split.rho_f;
        } else if (rl) {
            split.rho_l = parse_double("lf.rho_l", *rl);
            split.rho_f = 1.0 - split.rho_l;
        }
        validate(split);
        cfg.split = split;
        if (const std::string* v = get("lf.leader_x0")) {
            cfg.leader_x0 = parse_double_list("lf.leader_x0", *v);
            if (cfg.leader_x0.size() != split.n_leaders) {
                throw ValidationError("key \"lf.leader_x0\": expected " +
                                      std::to_string(split.n_leaders) + " values");
            }
        }
    } else {
        for (const char* key : {"lf.n_followers", "lf.n_leaders", "lf.rho_f", "lf.rho_l",
                                "lf.leader_x0"}) {
            if (get(key)) {
                throw ValidationError("key \"" + std::string(key) +
                                      "\" applies only to scenario = leader_follower");
            }
        }
    }

    if (const std::string* v = get("control.agent")) {
        if (cfg.scenario != Scenario::kSparseSingleAgent) {
            throw ValidationError("key \"control.agent\" applies only to sparse_single_agent");
        }
        const std::size_t population = cfg.mean_field_model_ ? cfg.n_particles : cfg.n_agents;
        const std::size_t agent = parse_size("control.agent", *v, 0);
        if (agent >= population) {
            throw ValidationError("key \"control.agent\": index " + std::to_string(agent) +
                                  " out of range for population " + std::to_string(population));
        }
        cfg.pinned_agent = agent;
    }

    if (cfg.is_mean_field() && !lf && cfg.n_sample > cfg.n_particles) {
        throw ValidationError("key \"mfmc.n_sample\": exceeds mfmc.n_particles");
    }
    if (cfg.scenario == Scenario::kLeaderFollowerHybrid && cfg.n_sample > cfg.split.n_followers) {
        throw ValidationError("key \"mfmc.n_sample\": exceeds lf.n_followers");
    }

    // Explicit-Euler guard (validation-time counterpart of run_micro's check).
    const double k_mag = cfg.has_control() ? std::abs(cfg.k) : 0.0;
    if (cfg.dt * (cfg.kernel.p_bar + k_mag) > 0.5) {
        throw ValidationError("keys \"dt\"/\"kernel.p_bar\"/\"control.k\": dt*(p_bar+|k|) = " +
                              std::to_string(cfg.dt * (cfg.kernel.p_bar + k_mag)) +
                              " exceeds the explicit-Euler guard 0.5");
    }

    if (cfg.has_control() && cfg.k > 0.0) {
        cfg.warnings.push_back(
            "control.k = " + format_double(cfg.k) +
            " makes the controlled eigenvalue positive; stabilization not guaranteed");
    } else if (cfg.is_leader_follower() && std::abs(cfg.k) <= 2.0 * cfg.kernel.p_bar) {
        cfg.warnings.push_back(
            "|control.k| <= 2*kernel.p_bar: the exponential decay guarantee for the "
            "leader-follower model does not apply");
    }

    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return resolve_config(parse_config_file(path));
}

RawConfig to_raw(const ScenarioConfig& cfg) {
    RawConfig raw;
    const bool lf = cfg.is_leader_follower();
    raw.set("scenario", lf ? "leader_follower" : scenario_name(cfg.scenario));
    if (lf) {
        raw.set("lf.mode", cfg.scenario == Scenario::kLeaderFollowerHybrid ? "hybrid" : "micro");
    } else {
        raw.set("model", cfg.mean_field_model_ ? "meanfield" : "micro");
    }
    raw.set("kernel.family", kernel_family_name(cfg.kernel.family));
    raw.set("kernel.p_bar", format_double(cfg.kernel.p_bar));
    if (cfg.has_control()) {
        raw.set("control.k", format_double(cfg.k));
        raw.set("control.c", format_double(cfg.c));
    }
    if (cfg.pinned_agent) raw.set("control.agent", std::to_string(*cfg.pinned_agent));

    if (lf) {
        raw.set("lf.n_followers", std::to_string(cfg.split.n_followers));
        raw.set("lf.n_leaders", std::to_string(cfg.split.n_leaders));
        raw.set("lf.rho_f", format_double(cfg.split.rho_f));
        raw.set("lf.rho_l", format_double(cfg.split.rho_l));
        if (!cfg.leader_x0.empty()) {
            std::string list;
            for (std::size_t i = 0; i < cfg.leader_x0.size(); ++i) {
                if (i > 0) list += ',';
                list += format_double(cfg.leader_x0[i]);
            }
            raw.set("lf.leader_x0", list);
        }
    } else if (cfg.mean_field_model_) {
        raw.set("mfmc.n_particles", std::to_string(cfg.n_particles));
    } else {
        raw.set("n_agents", std::to_string(cfg.n_agents));
    }
    if (cfg.is_mean_field()) {
        raw.set("mfmc.n_sample", std::to_string(cfg.n_sample));
        raw.set("mfmc.bins", std::to_string(cfg.bins));
        raw.set("mfmc.range_lo", format_double(cfg.range_lo));
        raw.set("mfmc.range_hi", format_double(cfg.range_hi));
    }

    raw.set("dt", format_double(cfg.dt));
    raw.set("horizon", format_double(cfg.horizon));
    raw.set("init.lo", format_double(cfg.init_lo));
    raw.set("init.hi", format_double(cfg.init_hi));
    raw.set("seed", std::to_string(cfg.seed));
    raw.set("record_stride", std::to_string(cfg.record_stride));
    raw.set("output_dir", cfg.output_dir);
    return raw;
}

}  // namespace steer
