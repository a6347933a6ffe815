#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critheat/config.hpp"
#include "critheat/experiments.hpp"
#include "critheat/io.hpp"
#include "critheat/manifest.hpp"
#include "critheat/version.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitVerifierFailure = 1;
constexpr int kExitConfigError = 2;

struct CommonArgs {
    std::string config_path;
    std::string manifest_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    bool echo = false;
    bool has_seed = false;
    std::uint64_t seed = 0;
    bool has_replicas = false;
    std::uint64_t replicas = 0;
    bool has_workers = false;
    int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "INI config file");
    cmd->add_option("--from-manifest", args.manifest_path,
                    "replay the config snapshot embedded in a manifest.json");
    cmd->add_option("--set", args.overrides, "override as section.key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory (default $CRITHEAT_OUT or ./critheat_out)");
    cmd->add_flag("--echo", args.echo, "print the resolved config as JSON");
    cmd->add_option("--seed", args.seed, "shorthand for ensemble.master_seed")->each([&](const std::string&) {
        args.has_seed = true;
    });
    cmd->add_option("--replicas", args.replicas, "shorthand for ensemble.replicas")->each([&](const std::string&) {
        args.has_replicas = true;
    });
    cmd->add_option("--workers", args.workers, "shorthand for ensemble.workers")->each([&](const std::string&) {
        args.has_workers = true;
    });
}

critheat::SolverConfig resolve_config(const CommonArgs& args) {
    critheat::RawConfig raw;
    if (!args.manifest_path.empty() && !args.config_path.empty()) {
        throw critheat::ConfigError("--config and --from-manifest are mutually exclusive");
    }
    if (!args.manifest_path.empty()) {
        nlohmann::ordered_json manifest;
        try {
            manifest = nlohmann::ordered_json::parse(critheat::read_text_file(args.manifest_path));
        } catch (const std::exception& e) {
            throw critheat::ConfigError(std::string("cannot parse manifest: ") + e.what());
        }
        if (!manifest.contains("config")) {
            throw critheat::ConfigError("manifest has no config snapshot: " + args.manifest_path);
        }
        raw = critheat::raw_from_json(manifest["config"]);
    } else if (!args.config_path.empty()) {
        raw = critheat::load_raw_config(args.config_path);
    }
    for (const std::string& assignment : args.overrides) {
        critheat::apply_override(raw, assignment);
    }
    if (args.has_seed) {
        critheat::apply_override(raw, "ensemble.master_seed=" + std::to_string(args.seed));
    }
    if (args.has_replicas) {
        critheat::apply_override(raw, "ensemble.replicas=" + std::to_string(args.replicas));
    }
    if (args.has_workers) {
        critheat::apply_override(raw, "ensemble.workers=" + std::to_string(args.workers));
    }
    return critheat::build_config(raw);
}

std::filesystem::path resolve_out_dir(const CommonArgs& args, const std::string& subcommand) {
    if (!args.out_dir.empty()) return args.out_dir;
    if (const char* env = std::getenv("CRITHEAT_OUT"); env != nullptr && *env != '\0') {
        return std::filesystem::path(env) / subcommand;
    }
    return std::filesystem::path("critheat_out") / subcommand;
}

void print_verdicts(const critheat::RunOutcome& outcome) {
    for (const critheat::Verdict& verdict : outcome.verdicts) {
        std::cout << "[" << critheat::verdict_status_name(verdict.status) << "] " << verdict.name
                  << "  statistic=" << critheat::format_g17(verdict.statistic)
                  << "  threshold=" << critheat::format_g17(verdict.threshold);
        if (!verdict.note.empty()) std::cout << "  (" << verdict.note << ")";
        std::cout << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    using critheat::OutputWriter;
    using critheat::RunOutcome;
    using critheat::SolverConfig;

    CLI::App app{"stochastic heat equation laboratory: simulation, stopping-time "
                 "instrumentation, and statistical verifiers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(critheat::kToolVersion));

    struct Sub {
        CLI::App* cmd = nullptr;
        CommonArgs args;
        std::function<RunOutcome(const SolverConfig&, OutputWriter&)> run;
    };
    std::map<std::string, Sub> subs;

    critheat::SimulateOptions simulate_options;
    const auto add = [&](const std::string& name, const std::string& description,
                         std::function<RunOutcome(const SolverConfig&, OutputWriter&)> run) {
        Sub& sub = subs[name];
        sub.cmd = app.add_subcommand(name, description);
        sub.run = std::move(run);
        add_common(sub.cmd, sub.args);
        return sub.cmd;
    };

    add("verify-kernel", "deterministic heat-kernel checks", critheat::run_verify_kernel);
    add("verify-noise", "white-noise covariance and isometry checks", critheat::run_verify_noise);
    CLI::App* simulate_cmd = add("simulate", "single trajectory of the configured process",
                                 [&simulate_options](const SolverConfig& cfg, OutputWriter& writer) {
                                     return critheat::run_simulate(cfg, writer, simulate_options);
                                 });
    simulate_cmd->add_flag("--dump-noise", simulate_options.dump_noise,
                           "write the replayable noise stream (noise.bin)");
    simulate_cmd->add_flag("--snapshot", simulate_options.snapshot_final,
                           "write the final field (field_final.bin)");
    add("couple", "coupled ordering with 4x dt refinement on matched noise", critheat::run_couple);
    add("convolve", "stochastic convolution variance and factorization refinement",
        critheat::run_convolve);
    add("verify-moment", "bounded-ratio moment scaling of sup|Z|^p", critheat::run_verify_moment);
    add("verify-l1", "stopped-L1 submartingale, maximal bound, quadratic variation",
        critheat::run_verify_l1);
    add("sweep-gamma", "explosion frequency across the gamma grid", critheat::run_sweep_gamma);
    add("report", "reference ensemble with doubling statistics", critheat::run_report);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfigError;
    }

    for (auto& [name, sub] : subs) {
        if (!sub.cmd->parsed()) continue;
        try {
            const SolverConfig config = resolve_config(sub.args);
            if (sub.args.echo) {
                std::cout << critheat::config_to_json(config).dump(2) << "\n";
            }
            OutputWriter writer(resolve_out_dir(sub.args, name), name, config);
            const RunOutcome outcome = sub.run(config, writer);
            writer.finish();
            print_verdicts(outcome);
            std::cout << name << ": outputs in " << writer.directory().string() << "\n";
            return outcome.exit_code == 0 ? kExitPass : kExitVerifierFailure;
        } catch (const critheat::ConfigError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfigError;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfigError;
        }
    }
    return kExitConfigError;
}
