#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "critheat/coefficients.hpp"
#include "critheat/grid.hpp"
#include "critheat/stopping.hpp"

#include <json.hpp>

namespace critheat {

/// Which process a single trajectory evolves.
///   U:      no drift, coefficient sigma_n(u)          (the base equation)
///   V:      drift f_eps, coefficient sigma_n(v)       (upper comparison process)
///   VMinus: drift f_eps, coefficient sigma_n(-v_minus) (lower comparison process)
enum class Process { U, V, VMinus };

enum class InitialKind { Constant, Cosine, RandomTrig };

struct ExperimentCfg {
    Process process = Process::V;
    InitialKind initial = InitialKind::Constant;
    double initial_value = 1.0;
    double initial_amplitude = 0.5;
    double tol_order = 1e-6;          // comparison-violation tolerance
    bool stop_on_inf_floor = false;   // make the inf-floor event terminal
    bool stop_on_l1_ceiling = false;  // make the L1-ceiling event terminal
    bool doubling = true;             // collect the dyadic doubling log
    bool critical = false;            // require the growth gate on sigma
    double growth_c = 0.0;            // 0 resolves to 2*sigma.c
    std::vector<double> gamma_grid = {1.0, 1.25, 1.5, 1.75, 2.0};
};

struct EnsembleCfg {
    std::size_t replicas = 100;
    std::uint64_t master_seed = 1234;
    std::size_t stride = 100;  // series sampling stride, in steps
    int workers = 0;           // 0 = available parallelism
};

struct ConvolutionCfg {
    double p = 8.0;                 // moment order, > 6
    double beta = 0.2;              // must lie in (3/(2p), 1/4)
    double phi_level = 1.0;         // constant integrand level L
    std::vector<double> t_grid = {0.1, 0.2, 0.4, 0.8};
};

struct SolverConfig {
    Grid grid;
    SigmaFamily sigma;
    DriftSpec drift;          // alpha plus the clamp floor epsilon
    double clamp_n = 1e6;     // sigma clamp level n
    TrackerSet thresholds;
    double doob_m = 1000.0;   // L1 level for the maximal-inequality check
    EnsembleCfg ensemble;
    ExperimentCfg experiment;
    ConvolutionCfg convolution;
};

/// Configuration failure with the offending key path in the message.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

/// Flat "section.key" -> raw value map, string-typed.
using RawConfig = std::map<std::string, std::string>;

/// Parses the INI-style file: [section] headers, key = value lines,
/// '#'/';' comments. Throws ConfigError on missing file or malformed lines.
RawConfig load_raw_config(const std::filesystem::path& path);
RawConfig parse_raw_config(const std::string& text);

/// Applies one "section.key=value" override (flag > file > default).
void apply_override(RawConfig& raw, const std::string& assignment);

/// Typed construction with full validation. Unknown keys, out-of-range
/// values, and a failed criticality gate all throw ConfigError.
SolverConfig build_config(const RawConfig& raw);

SolverConfig default_config();

/// Resolved config snapshot with every key echoed, insertion-ordered.
nlohmann::ordered_json config_to_json(const SolverConfig& config);

/// Inverse of config_to_json for manifest replay: flattens the snapshot back
/// into raw section.key strings (floats via %.17g, so values round-trip).
RawConfig raw_from_json(const nlohmann::ordered_json& snapshot);

const char* process_name(Process process);
const char* initial_kind_name(InitialKind kind);
const char* sigma_kind_name(SigmaKind kind);

} // namespace critheat
