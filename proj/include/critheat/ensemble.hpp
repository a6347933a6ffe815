#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/solver.hpp"
#include "critheat/stopping.hpp"

#include <json.hpp>

namespace critheat {

enum class VerdictStatus { Pass, Fail, Inconclusive, Vacuous };

const char* verdict_status_name(VerdictStatus status);

/// Outcome of one statistical verifier, carrying its statistic, threshold,
/// margin, and sample size so reported verdicts are self-describing.
struct Verdict {
    std::string name;
    VerdictStatus status = VerdictStatus::Inconclusive;
    double statistic = 0.0;
    double threshold = 0.0;
    double margin = 0.0;     // slack in the comparison, sign convention per verifier
    std::size_t replicas = 0;
    std::string note;

    bool failed() const { return status == VerdictStatus::Fail; }
};

nlohmann::ordered_json verdict_to_json(const Verdict& verdict);

struct ReplicaSummary {
    std::size_t replica = 0;
    std::uint64_t seed = 0;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    std::size_t final_index = 0;
    double final_l1 = 0.0;
    double final_linf = 0.0;
    double final_qv = 0.0;
    double sup_i_stopped = 0.0;
    double qv_stopped = 0.0;
    double max_linf = 0.0;
    double min_field = 0.0;
    std::vector<double> i_series;  // stopped L1 on the shared mark grid
    std::optional<std::size_t> inf_floor_index;
    std::optional<std::size_t> l1_ceiling_index;
    std::optional<std::size_t> explosion_index;
    std::size_t doubling_total = 0;
    int doubling_max_level = 0;
    std::map<int, std::size_t> doubles_per_level;
};

struct EnsembleReport {
    SolverConfig config;
    std::uint64_t master_seed = 0;
    std::vector<double> sample_times;     // shared mark grid
    std::vector<ReplicaSummary> replicas; // in replica order
    DoublingStats doubling;
    std::size_t explosions = 0;
};

/// Runs `replicas` independent trajectories of the configured process, one
/// deterministic substream per replica. Replicas fill their own slots, so the
/// report is identical for any worker count; workers = 1 takes a genuinely
/// serial path kept as the reference for the parallel one.
EnsembleReport run_ensemble(const SolverConfig& config, std::size_t replicas,
                            std::uint64_t master_seed, int workers);

/// Mean of the stopped L1 process must be nondecreasing along the mark grid
/// within 3 standard errors of each paired consecutive difference.
/// `grid_points` selects mark indices; empty means the full grid. Fewer than
/// 100 replicas is inconclusive.
Verdict submartingale_test(const EnsembleReport& report, std::span<const std::size_t> grid_points = {});

/// Empirical P(sup I > M) against (|v(0)|_{L1} + 2 pi T eps^{-alpha}) / M,
/// compared through the Wilson interval lower bound. A bound >= 1 is vacuous.
Verdict doob_bound_check(const EnsembleReport& report, double l1_ceiling, double epsilon,
                         double alpha, double horizon);

/// mean qv_stopped + 3 SE <= M^2.
Verdict quadratic_variation_check(const EnsembleReport& report, double l1_ceiling);

/// Per-level doubling counts must decay across levels with >= 10 events, and
/// no replica may explode before its inf-floor/L1-ceiling stop.
Verdict doubling_finiteness_check(const EnsembleReport& report);

struct FloorDipRow {
    double epsilon = 0.0;
    std::size_t dipped = 0;     // replicas whose running min fell below epsilon
    double fraction = 0.0;
};

/// Fraction of trajectories whose minimum ever falls below each floor level,
/// descending grid; the fractions are nonincreasing by nesting and quantify
/// how strongly the singular drift keeps the process away from zero.
std::vector<FloorDipRow> floor_dip_fractions(const EnsembleReport& report,
                                             std::span<const double> epsilons);

/// One moment-scaling row: T, empirical mean of sup^p, and the bound ratio.
struct MomentScaleRow {
    double horizon = 0.0;
    double mean_sup_p = 0.0;
    double envelope = 0.0;  // L^p T^{p/4 - 1/2}
    double ratio = 0.0;     // mean_sup_p / envelope
};

struct MomentScalingResult {
    std::vector<MomentScaleRow> rows;
    double fitted_c = 0.0;
    Verdict verdict;
};

/// Bounded-ratio test of E sup |Z|^p <= 2 c L^p T^{p/4-1/2}: c is fitted on
/// the two smallest horizons and every larger horizon must stay within the
/// factor-2 envelope. The horizon grid must have at least 4 points; each
/// horizon must be an integer number of steps.
MomentScalingResult moment_scaling_check(const SolverConfig& config, std::size_t replicas,
                                         std::uint64_t master_seed, int workers);

struct GammaSweepRow {
    double gamma = 0.0;
    std::size_t replicas = 0;
    std::size_t explosions = 0;
    double frequency = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

/// Explosion frequency of the base (drift-free) process across the gamma
/// grid, common random numbers across gamma values.
std::vector<GammaSweepRow> gamma_sweep(const SolverConfig& base_config, std::size_t replicas,
                                       std::uint64_t master_seed, int workers);

/// Nondecreasing-within-CI-overlap test over the sweep rows.
Verdict gamma_monotonicity_check(std::span<const GammaSweepRow> rows);

/// Wilson score interval for a binomial frequency at z = 3.
struct WilsonInterval {
    double low = 0.0;
    double high = 1.0;
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 3.0);

} // namespace critheat
