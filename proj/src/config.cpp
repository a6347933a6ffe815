#include "critheat/config.hpp"

#include <cctype>
#include <cstdio>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace critheat {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

/// Pulls typed values out of a RawConfig and records which keys were read,
/// so leftovers can be rejected as unknown.
class KeyReader {
public:
    explicit KeyReader(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) {
        consumed_.insert(key);
        return raw_.count(key) > 0;
    }

    std::string get_string(const std::string& key, const std::string& fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        return it == raw_.end() ? fallback : it->second;
    }

    double get_real(const std::string& key, double fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("invalid real for " + key + ": '" + it->second + "'");
        }
    }

    std::uint64_t get_unsigned(const std::string& key, std::uint64_t fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string& text = it->second;
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ConfigError("invalid unsigned integer for " + key + ": '" + text + "'");
        }
        return v;
    }

    int get_int(const std::string& key, int fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        const std::string& text = it->second;
        int v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size()) {
            throw ConfigError("invalid integer for " + key + ": '" + text + "'");
        }
        return v;
    }

    bool get_bool(const std::string& key, bool fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw ConfigError("invalid boolean for " + key + ": '" + it->second + "'");
    }

    std::vector<double> get_real_list(const std::string& key, std::vector<double> fallback) {
        consumed_.insert(key);
        auto it = raw_.find(key);
        if (it == raw_.end()) return fallback;
        std::vector<double> values;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                values.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw ConfigError("invalid real list for " + key + ": '" + it->second + "'");
            }
        }
        return values;
    }

    void reject_unknown() const {
        for (const auto& [key, value] : raw_) {
            if (!consumed_.count(key)) {
                throw ConfigError("unknown config key: " + key);
            }
        }
    }

private:
    const RawConfig& raw_;
    std::set<std::string> consumed_;
};

} // namespace

RawConfig parse_raw_config(const std::string& text) {
    RawConfig raw;
    std::string section;
    std::istringstream stream(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("empty section name at line " + std::to_string(lineno));
            }
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("expected key = value at line " + std::to_string(lineno));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("empty key at line " + std::to_string(lineno));
        }
        if (section.empty()) {
            throw ConfigError("key outside any [section] at line " + std::to_string(lineno));
        }
        raw[section + "." + key] = value;
    }
    return raw;
}

RawConfig load_raw_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return parse_raw_config(buffer.str());
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like section.key=value: " + assignment);
    }
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos) {
        throw ConfigError("override key must be section.key: " + assignment);
    }
    raw[key] = trim(assignment.substr(eq + 1));
}

SolverConfig default_config() {
    return SolverConfig{};
}

SolverConfig build_config(const RawConfig& raw) {
    KeyReader reader(raw);
    SolverConfig cfg;

    cfg.grid.n = reader.get_unsigned("grid.n", 64);
    cfg.grid.dt = reader.get_real("grid.dt", 1e-3);
    cfg.grid.steps = reader.get_unsigned("grid.steps", 1000);
    try {
        validate_grid(cfg.grid);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    const std::string kind = reader.get_string("sigma.kind", "critical_power");
    if (kind == "critical_power") {
        cfg.sigma.kind = SigmaKind::CriticalPower;
    } else if (kind == "power") {
        cfg.sigma.kind = SigmaKind::Power;
    } else if (kind == "linear") {
        cfg.sigma.kind = SigmaKind::Linear;
    } else {
        throw ConfigError("sigma.kind must be critical_power, power, or linear (got '" + kind + "')");
    }
    cfg.sigma.c = reader.get_real("sigma.c", 1.0);
    cfg.sigma.gamma = reader.get_real("sigma.gamma", 1.5);
    try {
        validate_sigma(cfg.sigma);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("sigma: ") + e.what());
    }

    cfg.drift.alpha = reader.get_real("drift.alpha", 4.0);
    cfg.drift.epsilon = reader.get_real("clamp.epsilon", 0.5);
    try {
        validate_drift(cfg.drift);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.clamp_n = reader.get_real("clamp.n", 1e6);
    if (!(cfg.clamp_n > 0.0)) throw ConfigError("clamp.n must be > 0");

    cfg.thresholds.epsilon = reader.get_real("thresholds.epsilon", cfg.drift.epsilon);
    cfg.thresholds.l1_ceiling = reader.get_real("thresholds.m", 10.0);
    cfg.thresholds.sup_levels = reader.get_real_list("thresholds.n_levels", {});
    cfg.thresholds.explosion_ceiling = reader.get_real("thresholds.n_max", 1e6);
    try {
        validate_trackers(cfg.thresholds);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    cfg.doob_m = reader.get_real("thresholds.doob_m", 1000.0);
    if (!(cfg.doob_m > 0.0)) throw ConfigError("thresholds.doob_m must be > 0");

    cfg.ensemble.replicas = reader.get_unsigned("ensemble.replicas", 100);
    if (cfg.ensemble.replicas < 1) throw ConfigError("ensemble.replicas must be >= 1");
    cfg.ensemble.master_seed = reader.get_unsigned("ensemble.master_seed", 1234);
    cfg.ensemble.stride = reader.get_unsigned("ensemble.stride", 100);
    if (cfg.ensemble.stride < 1) throw ConfigError("ensemble.stride must be >= 1");
    cfg.ensemble.workers = reader.get_int("ensemble.workers", 0);
    if (cfg.ensemble.workers < 0) throw ConfigError("ensemble.workers must be >= 0");

    const std::string process = reader.get_string("experiment.process", "v");
    if (process == "u") {
        cfg.experiment.process = Process::U;
    } else if (process == "v") {
        cfg.experiment.process = Process::V;
    } else if (process == "vminus") {
        cfg.experiment.process = Process::VMinus;
    } else {
        throw ConfigError("experiment.process must be u, v, or vminus (got '" + process + "')");
    }
    const std::string initial = reader.get_string("experiment.initial", "constant");
    if (initial == "constant") {
        cfg.experiment.initial = InitialKind::Constant;
    } else if (initial == "cosine") {
        cfg.experiment.initial = InitialKind::Cosine;
    } else if (initial == "random_trig") {
        cfg.experiment.initial = InitialKind::RandomTrig;
    } else {
        throw ConfigError("experiment.initial must be constant, cosine, or random_trig (got '" + initial + "')");
    }
    cfg.experiment.initial_value = reader.get_real("experiment.initial_value", 1.0);
    cfg.experiment.initial_amplitude = reader.get_real("experiment.initial_amplitude", 0.5);
    cfg.experiment.tol_order = reader.get_real("experiment.tol_order", 1e-6);
    if (!(cfg.experiment.tol_order > 0.0)) throw ConfigError("experiment.tol_order must be > 0");
    cfg.experiment.stop_on_inf_floor = reader.get_bool("experiment.stop_on_inf_floor", false);
    cfg.experiment.stop_on_l1_ceiling = reader.get_bool("experiment.stop_on_l1_ceiling", false);
    cfg.experiment.doubling = reader.get_bool("experiment.doubling", true);
    cfg.experiment.critical = reader.get_bool("experiment.critical", false);
    cfg.experiment.growth_c = reader.get_real("experiment.growth_c", 0.0);
    if (cfg.experiment.growth_c < 0.0) throw ConfigError("experiment.growth_c must be >= 0");
    cfg.experiment.gamma_grid = reader.get_real_list("experiment.gamma_grid", cfg.experiment.gamma_grid);
    for (std::size_t i = 1; i < cfg.experiment.gamma_grid.size(); ++i) {
        if (cfg.experiment.gamma_grid[i] <= cfg.experiment.gamma_grid[i - 1]) {
            throw ConfigError("experiment.gamma_grid must be sorted ascending");
        }
    }

    cfg.convolution.p = reader.get_real("convolution.p", 8.0);
    if (!(cfg.convolution.p > 6.0)) throw ConfigError("convolution.p must be > 6");
    cfg.convolution.beta = reader.get_real("convolution.beta", 0.2);
    if (!(cfg.convolution.beta > 3.0 / (2.0 * cfg.convolution.p)) || !(cfg.convolution.beta < 0.25)) {
        throw ConfigError("convolution.beta must lie in (3/(2p), 1/4)");
    }
    cfg.convolution.phi_level = reader.get_real("convolution.phi_level", 1.0);
    cfg.convolution.t_grid = reader.get_real_list("convolution.t_grid", cfg.convolution.t_grid);
    for (std::size_t i = 0; i < cfg.convolution.t_grid.size(); ++i) {
        if (!(cfg.convolution.t_grid[i] > 0.0)) throw ConfigError("convolution.t_grid values must be > 0");
        if (i > 0 && cfg.convolution.t_grid[i] <= cfg.convolution.t_grid[i - 1]) {
            throw ConfigError("convolution.t_grid must be sorted ascending");
        }
    }

    reader.reject_unknown();

    // Criticality gate: configurations claiming the critical family must
    // satisfy the 3/2 growth restriction on a wide test grid.
    if (cfg.experiment.critical) {
        const double big_c = cfg.experiment.growth_c > 0.0 ? cfg.experiment.growth_c : 2.0 * cfg.sigma.c;
        std::vector<double> grid_points;
        for (int i = -60; i <= 60; ++i) {
            const double magnitude = std::pow(10.0, 3.0 * std::abs(i) / 60.0) - 1.0;
            grid_points.push_back(i < 0 ? -magnitude : magnitude);
        }
        if (!growth_check(cfg.sigma, big_c, grid_points)) {
            throw ConfigError("sigma family violates the critical growth gate (sigma.kind=" +
                              std::string(sigma_kind_name(cfg.sigma.kind)) +
                              ", growth_c=" + std::to_string(big_c) + ")");
        }
    }

    return cfg;
}

const char* process_name(Process process) {
    switch (process) {
    case Process::U: return "u";
    case Process::V: return "v";
    case Process::VMinus: return "vminus";
    }
    return "unknown";
}

const char* initial_kind_name(InitialKind kind) {
    switch (kind) {
    case InitialKind::Constant: return "constant";
    case InitialKind::Cosine: return "cosine";
    case InitialKind::RandomTrig: return "random_trig";
    }
    return "unknown";
}

const char* sigma_kind_name(SigmaKind kind) {
    switch (kind) {
    case SigmaKind::CriticalPower: return "critical_power";
    case SigmaKind::Power: return "power";
    case SigmaKind::Linear: return "linear";
    }
    return "unknown";
}

nlohmann::ordered_json config_to_json(const SolverConfig& cfg) {
    nlohmann::ordered_json j;
    j["grid"] = {{"n", cfg.grid.n}, {"dt", cfg.grid.dt}, {"steps", cfg.grid.steps}};
    j["sigma"] = {{"kind", sigma_kind_name(cfg.sigma.kind)}, {"c", cfg.sigma.c}, {"gamma", cfg.sigma.gamma}};
    j["drift"] = {{"alpha", cfg.drift.alpha}};
    j["clamp"] = {{"epsilon", cfg.drift.epsilon}, {"n", cfg.clamp_n}};
    j["thresholds"] = {{"epsilon", cfg.thresholds.epsilon},
                       {"m", cfg.thresholds.l1_ceiling},
                       {"n_levels", cfg.thresholds.sup_levels},
                       {"n_max", cfg.thresholds.explosion_ceiling},
                       {"doob_m", cfg.doob_m}};
    j["ensemble"] = {{"replicas", cfg.ensemble.replicas},
                     {"master_seed", cfg.ensemble.master_seed},
                     {"stride", cfg.ensemble.stride},
                     {"workers", cfg.ensemble.workers}};
    j["experiment"] = {{"process", process_name(cfg.experiment.process)},
                       {"initial", initial_kind_name(cfg.experiment.initial)},
                       {"initial_value", cfg.experiment.initial_value},
                       {"initial_amplitude", cfg.experiment.initial_amplitude},
                       {"tol_order", cfg.experiment.tol_order},
                       {"stop_on_inf_floor", cfg.experiment.stop_on_inf_floor},
                       {"stop_on_l1_ceiling", cfg.experiment.stop_on_l1_ceiling},
                       {"doubling", cfg.experiment.doubling},
                       {"critical", cfg.experiment.critical},
                       {"growth_c", cfg.experiment.growth_c},
                       {"gamma_grid", cfg.experiment.gamma_grid}};
    j["convolution"] = {{"p", cfg.convolution.p},
                        {"beta", cfg.convolution.beta},
                        {"phi_level", cfg.convolution.phi_level},
                        {"t_grid", cfg.convolution.t_grid}};
    return j;
}


namespace {

std::string json_scalar_to_string(const nlohmann::ordered_json& value) {
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_string()) return value.get<std::string>();
    if (value.is_number_unsigned()) return std::to_string(value.get<std::uint64_t>());
    if (value.is_number_integer()) return std::to_string(value.get<std::int64_t>());
    if (value.is_number_float()) {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.17g", value.get<double>());
        return buffer;
    }
    throw ConfigError("unsupported scalar in config snapshot");
}

} // namespace

RawConfig raw_from_json(const nlohmann::ordered_json& snapshot) {
    RawConfig raw;
    for (const auto& [section, body] : snapshot.items()) {
        if (!body.is_object()) {
            throw ConfigError("config snapshot section is not an object: " + section);
        }
        for (const auto& [key, value] : body.items()) {
            const std::string path = section + "." + key;
            if (value.is_array()) {
                std::string joined;
                for (const auto& item : value) {
                    if (!joined.empty()) joined += ",";
                    joined += json_scalar_to_string(item);
                }
                raw[path] = joined;
            } else {
                raw[path] = json_scalar_to_string(value);
            }
        }
    }
    return raw;
}

} // namespace critheat
