#include "critheat/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "critheat/convolution.hpp"
#include "critheat/rng.hpp"

namespace critheat {

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

ReplicaSummary summarize(std::size_t replica, std::uint64_t seed, const TrajectoryRecord& record) {
    ReplicaSummary s;
    s.replica = replica;
    s.seed = seed;
    s.status = record.status;
    s.final_index = record.final_index;
    s.final_l1 = record.final_l1;
    s.final_linf = record.final_linf;
    s.final_qv = record.final_qv;
    s.sup_i_stopped = record.sup_i_stopped;
    s.qv_stopped = record.qv_stopped;
    s.max_linf = record.max_linf;
    s.min_field = record.min_field;
    s.i_series = record.i_series;
    for (const StopEvent& event : record.events) {
        switch (event.kind) {
        case StopKind::InfFloor: s.inf_floor_index = event.t_index; break;
        case StopKind::L1Ceiling: s.l1_ceiling_index = event.t_index; break;
        case StopKind::Explosion: s.explosion_index = event.t_index; break;
        case StopKind::SupCeiling: break;
        }
    }
    s.doubling_total = record.doubling.double_count();
    s.doubling_max_level = record.doubling.max_level();
    for (const DoublingEvent& entry : record.doubling.entries()) {
        if (entry.kind == DoublingEvent::Kind::Double) {
            ++s.doubles_per_level[entry.level - 1];
        }
    }
    return s;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_and_se(std::span<const double> values) {
    MeanSe out;
    const std::size_t n = values.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double v : values) {
        const double d = v - out.mean;
        ss += d * d;
    }
    out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

} // namespace

const char* verdict_status_name(VerdictStatus status) {
    switch (status) {
    case VerdictStatus::Pass: return "pass";
    case VerdictStatus::Fail: return "fail";
    case VerdictStatus::Inconclusive: return "inconclusive";
    case VerdictStatus::Vacuous: return "vacuous";
    }
    return "unknown";
}

nlohmann::ordered_json verdict_to_json(const Verdict& verdict) {
    nlohmann::ordered_json j;
    j["verifier"] = verdict.name;
    j["status"] = verdict_status_name(verdict.status);
    j["statistic"] = verdict.statistic;
    j["threshold"] = verdict.threshold;
    j["margin"] = verdict.margin;
    j["replicas"] = verdict.replicas;
    j["note"] = verdict.note;
    return j;
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    WilsonInterval interval;
    if (trials == 0) return interval;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    interval.low = std::max(0.0, center - half);
    interval.high = std::min(1.0, center + half);
    return interval;
}

EnsembleReport run_ensemble(const SolverConfig& config, std::size_t replicas,
                            std::uint64_t master_seed, int workers) {
    if (replicas < 1) throw ConfigError("ensemble.replicas must be >= 1");
    EnsembleReport report;
    report.config = config;
    report.master_seed = master_seed;
    for (std::size_t mark : sample_marks(config.grid, config.ensemble.stride)) {
        report.sample_times.push_back(config.grid.time(mark));
    }
    report.replicas.resize(replicas);

    const int pool = resolve_workers(workers);
    if (pool <= 1) {
        // Serial reference path; must agree byte-for-byte with the parallel one.
        for (std::size_t r = 0; r < replicas; ++r) {
            const std::uint64_t seed = substream_seed(master_seed, r);
            report.replicas[r] = summarize(r, seed, simulate(config, seed));
        }
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
        for (long long r = 0; r < static_cast<long long>(replicas); ++r) {
            const auto idx = static_cast<std::size_t>(r);
            const std::uint64_t seed = substream_seed(master_seed, idx);
            report.replicas[idx] = summarize(idx, seed, simulate(config, seed));
        }
    }

    // Deterministic reduction in replica order.
    std::vector<std::map<int, std::size_t>> counts;
    std::vector<std::size_t> totals;
    std::vector<int> peaks;
    counts.reserve(replicas);
    for (const ReplicaSummary& r : report.replicas) {
        counts.push_back(r.doubles_per_level);
        totals.push_back(r.doubling_total);
        peaks.push_back(r.doubling_max_level);
        if (r.status == TrajectoryStatus::Exploded) ++report.explosions;
    }
    report.doubling = merge_doubling_counts(counts, totals, peaks);
    return report;
}

Verdict submartingale_test(const EnsembleReport& report, std::span<const std::size_t> grid_points) {
    Verdict verdict;
    verdict.name = "l1_submartingale";
    verdict.replicas = report.replicas.size();
    if (verdict.replicas < 100) {
        verdict.status = VerdictStatus::Inconclusive;
        verdict.note = "needs >= 100 replicas";
        return verdict;
    }
    std::vector<std::size_t> points(grid_points.begin(), grid_points.end());
    if (points.empty()) {
        points.resize(report.sample_times.size());
        for (std::size_t i = 0; i < points.size(); ++i) points[i] = i;
    }
    // Paired consecutive differences of the stopped L1 process.
    double worst = 0.0;          // most negative (mean + 3 se) over the pairs
    std::size_t worst_pair = 0;
    std::vector<double> diffs(verdict.replicas);
    for (std::size_t i = 1; i < points.size(); ++i) {
        for (std::size_t r = 0; r < verdict.replicas; ++r) {
            const auto& series = report.replicas[r].i_series;
            diffs[r] = series.at(points[i]) - series.at(points[i - 1]);
        }
        const MeanSe d = mean_and_se(diffs);
        const double slack = d.mean + 3.0 * d.se;
        if (i == 1 || slack < worst) {
            worst = slack;
            worst_pair = i;
        }
    }
    verdict.statistic = worst;
    verdict.threshold = 0.0;
    verdict.margin = worst;
    verdict.status = worst >= 0.0 ? VerdictStatus::Pass : VerdictStatus::Fail;
    std::ostringstream note;
    note << "min over pairs of (mean diff + 3 SE), worst at grid pair " << worst_pair;
    verdict.note = note.str();
    return verdict;
}

Verdict doob_bound_check(const EnsembleReport& report, double l1_ceiling, double epsilon,
                         double alpha, double horizon) {
    Verdict verdict;
    verdict.name = "l1_doob_bound";
    verdict.replicas = report.replicas.size();

    double initial_l1 = 0.0;
    if (!report.replicas.empty() && !report.replicas.front().i_series.empty()) {
        initial_l1 = report.replicas.front().i_series.front();
    }
    const double bound = (initial_l1 + kTwoPi * horizon * std::pow(epsilon, -alpha)) / l1_ceiling;
    verdict.threshold = bound;

    if (bound >= 1.0) {
        verdict.status = VerdictStatus::Vacuous;
        verdict.note = "bound >= 1, trivially satisfied";
        return verdict;
    }
    std::size_t exceed = 0;
    for (const ReplicaSummary& r : report.replicas) {
        if (r.sup_i_stopped > l1_ceiling) ++exceed;
    }
    const WilsonInterval ci = wilson_interval(exceed, verdict.replicas);
    verdict.statistic = ci.low;
    verdict.margin = bound - ci.low;
    verdict.status = ci.low <= bound ? VerdictStatus::Pass : VerdictStatus::Fail;
    std::ostringstream note;
    note << "freq " << (verdict.replicas ? static_cast<double>(exceed) / verdict.replicas : 0.0)
         << ", wilson [" << ci.low << ", " << ci.high << "] vs bound " << bound;
    verdict.note = note.str();
    return verdict;
}

Verdict quadratic_variation_check(const EnsembleReport& report, double l1_ceiling) {
    Verdict verdict;
    verdict.name = "l1_quadratic_variation";
    verdict.replicas = report.replicas.size();
    std::vector<double> qv(report.replicas.size());
    for (std::size_t r = 0; r < qv.size(); ++r) qv[r] = report.replicas[r].qv_stopped;
    const MeanSe stat = mean_and_se(qv);
    verdict.statistic = stat.mean + 3.0 * stat.se;
    verdict.threshold = l1_ceiling * l1_ceiling;
    verdict.margin = verdict.threshold - verdict.statistic;
    verdict.status = verdict.statistic <= verdict.threshold ? VerdictStatus::Pass : VerdictStatus::Fail;
    std::ostringstream note;
    note << "mean " << stat.mean << " + 3*SE " << 3.0 * stat.se << " vs M^2";
    verdict.note = note.str();
    return verdict;
}

Verdict doubling_finiteness_check(const EnsembleReport& report) {
    Verdict verdict;
    verdict.name = "doubling_finiteness";
    verdict.replicas = report.replicas.size();
    verdict.threshold = 10.0; // levels below this event count are not trend-tested

    // No replica may hit the explosion ceiling before its stop.
    for (const ReplicaSummary& r : report.replicas) {
        if (!r.explosion_index) continue;
        const std::size_t stop = std::min(r.inf_floor_index.value_or(~std::size_t{0}),
                                          r.l1_ceiling_index.value_or(~std::size_t{0}));
        if (*r.explosion_index <= stop) {
            verdict.status = VerdictStatus::Fail;
            verdict.note = "replica " + std::to_string(r.replica) + " exploded before its stop";
            return verdict;
        }
    }

    std::vector<std::pair<int, std::size_t>> qualifying;
    for (const auto& [level, count] : report.doubling.doubles_per_level) {
        if (count >= 10) qualifying.emplace_back(level, count);
    }
    verdict.statistic = static_cast<double>(report.doubling.total_doubles);
    // Trend test across qualifying levels: pairwise comparisons must be
    // decreasing in the majority (strict monotonicity is too brittle — the
    // ladder bounces between adjacent mid levels and inflates their counts).
    std::size_t decreasing_pairs = 0;
    std::size_t increasing_pairs = 0;
    for (std::size_t i = 0; i < qualifying.size(); ++i) {
        for (std::size_t j = i + 1; j < qualifying.size(); ++j) {
            if (qualifying[i].second > qualifying[j].second) ++decreasing_pairs;
            if (qualifying[i].second < qualifying[j].second) ++increasing_pairs;
        }
    }
    const bool decaying = qualifying.size() < 2 || decreasing_pairs > increasing_pairs;
    verdict.status = decaying ? VerdictStatus::Pass : VerdictStatus::Fail;
    std::ostringstream note;
    note << "total doubles " << report.doubling.total_doubles << ", per-level";
    for (const auto& [level, count] : report.doubling.doubles_per_level) {
        note << " " << level << ":" << count;
    }
    if (qualifying.empty()) note << " (no level reached 10 events; trend vacuously holds)";
    verdict.note = note.str();
    return verdict;
}

std::vector<FloorDipRow> floor_dip_fractions(const EnsembleReport& report,
                                             std::span<const double> epsilons) {
    std::vector<FloorDipRow> rows;
    for (double epsilon : epsilons) {
        FloorDipRow row;
        row.epsilon = epsilon;
        for (const ReplicaSummary& r : report.replicas) {
            if (r.min_field < epsilon) ++row.dipped;
        }
        row.fraction = report.replicas.empty()
                           ? 0.0
                           : static_cast<double>(row.dipped) / static_cast<double>(report.replicas.size());
        rows.push_back(row);
    }
    return rows;
}

MomentScalingResult moment_scaling_check(const SolverConfig& config, std::size_t replicas,
                                         std::uint64_t master_seed, int workers) {
    const ConvolutionCfg& spec = config.convolution;
    if (spec.t_grid.size() < 4) {
        throw ConfigError("convolution.t_grid needs at least 4 points");
    }
    const Grid& grid = config.grid;
    std::vector<std::size_t> marks;
    for (double horizon : spec.t_grid) {
        const double steps_real = horizon / grid.dt;
        const auto mark = static_cast<std::size_t>(std::llround(steps_real));
        if (mark == 0 || mark > grid.steps || std::abs(steps_real - static_cast<double>(mark)) > 1e-9) {
            throw ConfigError("convolution.t_grid entries must be integer multiples of grid.dt within the horizon");
        }
        marks.push_back(mark);
    }

    // E sup |Z|^p at each horizon, common random numbers across horizons.
    std::vector<std::vector<double>> sup_p(spec.t_grid.size(), std::vector<double>(replicas, 0.0));
    const int pool = resolve_workers(workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
    for (long long r = 0; r < static_cast<long long>(replicas); ++r) {
        const auto idx = static_cast<std::size_t>(r);
        const ConvolutionResult run =
            stochastic_convolution(grid, spec.phi_level, substream_seed(master_seed, idx), marks);
        for (std::size_t ti = 0; ti < marks.size(); ++ti) {
            sup_p[ti][idx] = std::pow(run.sup_at_marks[ti], spec.p);
        }
    }

    MomentScalingResult result;
    const double level_p = std::pow(std::abs(spec.phi_level), spec.p);
    for (std::size_t ti = 0; ti < spec.t_grid.size(); ++ti) {
        MomentScaleRow row;
        row.horizon = spec.t_grid[ti];
        row.mean_sup_p = mean_and_se(sup_p[ti]).mean;
        row.envelope = level_p * std::pow(row.horizon, spec.p / 4.0 - 0.5);
        row.ratio = row.envelope > 0.0 ? row.mean_sup_p / row.envelope : 0.0;
        result.rows.push_back(row);
    }

    result.fitted_c = std::max(result.rows[0].ratio, result.rows[1].ratio);
    Verdict& verdict = result.verdict;
    verdict.name = "moment_scaling";
    verdict.replicas = replicas;
    verdict.threshold = 2.0 * result.fitted_c;
    double worst_ratio = 0.0;
    for (std::size_t ti = 2; ti < result.rows.size(); ++ti) {
        worst_ratio = std::max(worst_ratio, result.rows[ti].ratio);
    }
    verdict.statistic = worst_ratio;
    verdict.margin = verdict.threshold - worst_ratio;
    if (result.fitted_c == 0.0) {
        // phi == 0 makes Z identically zero.
        verdict.status = worst_ratio == 0.0 ? VerdictStatus::Pass : VerdictStatus::Fail;
    } else {
        verdict.status = worst_ratio <= verdict.threshold ? VerdictStatus::Pass : VerdictStatus::Fail;
    }
    std::ostringstream note;
    note << "fitted c " << result.fitted_c << " on two smallest horizons; ratios";
    for (const MomentScaleRow& row : result.rows) note << " " << row.ratio;
    verdict.note = note.str();
    return result;
}

std::vector<GammaSweepRow> gamma_sweep(const SolverConfig& base_config, std::size_t replicas,
                                       std::uint64_t master_seed, int workers) {
    std::vector<GammaSweepRow> rows;
    const int pool = resolve_workers(workers);
    for (double gamma : base_config.experiment.gamma_grid) {
        SolverConfig config = base_config;
        config.experiment.process = Process::U;
        config.experiment.doubling = false;
        config.sigma.kind = SigmaKind::Power;
        config.sigma.gamma = gamma;

        std::vector<unsigned char> exploded(replicas, 0);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
        for (long long r = 0; r < static_cast<long long>(replicas); ++r) {
            const auto idx = static_cast<std::size_t>(r);
            // Common random numbers: substream depends on the replica only.
            const TrajectoryRecord record = simulate(config, substream_seed(master_seed, idx));
            exploded[idx] = record.status == TrajectoryStatus::Exploded ? 1 : 0;
        }
        GammaSweepRow row;
        row.gamma = gamma;
        row.replicas = replicas;
        for (unsigned char e : exploded) row.explosions += e;
        row.frequency = replicas ? static_cast<double>(row.explosions) / static_cast<double>(replicas) : 0.0;
        const WilsonInterval ci = wilson_interval(row.explosions, replicas);
        row.wilson_low = ci.low;
        row.wilson_high = ci.high;
        rows.push_back(row);
    }
    return rows;
}

Verdict gamma_monotonicity_check(std::span<const GammaSweepRow> rows) {
    Verdict verdict;
    verdict.name = "gamma_sweep_monotone";
    verdict.replicas = rows.empty() ? 0 : rows.front().replicas;
    verdict.status = VerdictStatus::Pass;
    double worst_drop = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool nondecreasing = rows[i].frequency >= rows[i - 1].frequency;
        const bool ci_overlap = rows[i].wilson_high >= rows[i - 1].wilson_low;
        if (!nondecreasing && !ci_overlap) {
            verdict.status = VerdictStatus::Fail;
        }
        if (!nondecreasing) {
            worst_drop = std::max(worst_drop, rows[i - 1].frequency - rows[i].frequency);
        }
    }
    verdict.statistic = worst_drop;
    std::ostringstream note;
    note << "frequencies";
    for (const GammaSweepRow& row : rows) note << " " << row.gamma << ":" << row.frequency;
    verdict.note = note.str();
    return verdict;
}

} // namespace critheat
