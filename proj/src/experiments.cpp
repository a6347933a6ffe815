#include "critheat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "critheat/binio.hpp"
#include "critheat/convolution.hpp"
#include "critheat/heat_kernel.hpp"
#include "critheat/io.hpp"
#include "critheat/noise.hpp"
#include "critheat/rng.hpp"
#include "critheat/solver.hpp"

namespace critheat {

namespace {

Verdict make_bound_verdict(std::string name, double statistic, double threshold,
                           std::size_t replicas, std::string note) {
    Verdict verdict;
    verdict.name = std::move(name);
    verdict.statistic = statistic;
    verdict.threshold = threshold;
    verdict.margin = threshold - statistic;
    verdict.replicas = replicas;
    verdict.note = std::move(note);
    verdict.status = statistic <= threshold ? VerdictStatus::Pass : VerdictStatus::Fail;
    return verdict;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    std::vector<double> out(count);
    const double llo = std::log10(lo);
    const double lhi = std::log10(hi);
    for (std::size_t i = 0; i < count; ++i) {
        const double f = count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
        out[i] = std::pow(10.0, llo + f * (lhi - llo));
    }
    return out;
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

int exit_code_for(std::span<const Verdict> verdicts) {
    for (const Verdict& verdict : verdicts) {
        if (verdict.status == VerdictStatus::Fail || verdict.status == VerdictStatus::Inconclusive) {
            return 1;
        }
    }
    return 0;
}

std::string verdicts_json_text(std::span<const Verdict> verdicts) {
    nlohmann::ordered_json array = nlohmann::ordered_json::array();
    for (const Verdict& verdict : verdicts) array.push_back(verdict_to_json(verdict));
    return array.dump(2) + "\n";
}

RunOutcome run_verify_kernel(const SolverConfig& config, OutputWriter& writer) {
    (void)config;
    RunOutcome outcome;
    const KernelSpec series{KernelNorm::Sqrt2PiMass, 1e-12};
    const KernelSpec unit{KernelNorm::UnitMass, 1e-12};
    const double sqrt_two_pi = std::sqrt(kTwoPi);

    {
        double worst = 0.0;
        for (double t : {0.01, 0.1, 1.0, 10.0}) {
            worst = std::max(worst, std::abs(kernel_l1_norm(series, t, 8192) - sqrt_two_pi));
            worst = std::max(worst, std::abs(kernel_l1_norm(unit, t, 8192) - 1.0));
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_l1_mass", worst, 1e-6, 0, "max |L1 - mass| over t in {0.01,0.1,1,10}, both normalizations"));
    }
    {
        // Explicit sup-norm envelopes: sqrt(2/pi) + t^{-1/2}/2 holds for the
        // unit-mass series; the sqrt(2pi)-mass series needs the sqrt(2) larger
        // slope (2pi)^{-1/2} + t^{-1/2}/sqrt(2).
        double worst_unit = 0.0;
        double worst_series = 0.0;
        for (double t : log_spaced(1e-4, 1.0, 50)) {
            const double inv_sqrt_t = 1.0 / std::sqrt(t);
            worst_unit = std::max(worst_unit, kernel_sup(unit, t) -
                                                  (std::sqrt(2.0 / kPi) + 0.5 * inv_sqrt_t));
            worst_series = std::max(worst_series, kernel_sup(series, t) -
                                                      (1.0 / sqrt_two_pi + inv_sqrt_t / std::sqrt(2.0)));
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_sup_envelope_unit_mass", worst_unit, 0.0, 0,
            "max excess of sup over sqrt(2/pi) + t^{-1/2}/2, 50 log-spaced t in [1e-4,1]"));
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_sup_envelope_sqrt2pi_mass", worst_series, 0.0, 0,
            "max excess of sup over (2pi)^{-1/2} + t^{-1/2}/sqrt(2)"));
    }
    {
        double lowest = 0.0;
        for (double t : {1e-4, 1e-3, 1e-2, 0.1, 1.0}) {
            for (std::size_t j = 0; j < 4096; ++j) {
                const double x = -kPi + kTwoPi * static_cast<double>(j) / 4096.0;
                lowest = std::min(lowest, eval_kernel(series, t, x));
                lowest = std::min(lowest, eval_kernel(unit, t, x));
            }
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_positivity", -lowest, 1e-10, 0, "-(min value) over 4096-point grids, t >= 1e-4"));
    }
    {
        double worst = 0.0;
        for (double t : {1e-3, 0.05, 0.7}) {
            for (double x : {0.3, 1.7, 2.9}) {
                worst = std::max(worst, std::abs(eval_kernel(unit, t, x) - eval_kernel(unit, t, -x)));
                worst = std::max(worst, eval_kernel(unit, t, x) - kernel_sup(unit, t));
            }
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_symmetry_peak", worst, 0.0, 0, "cosine-series symmetry and centered peak"));
    }
    {
        SpectralWorkspace workspace(4096);
        Field field(4096, 0.0);
        GaussianStream draws(2024);
        for (double& v : field) v = draws.next();
        const Field ab = workspace.semigroup_apply(0.25, workspace.semigroup_apply(0.5, field));
        const Field a_plus_b = workspace.semigroup_apply(0.75, field);
        double worst = 0.0;
        for (std::size_t j = 0; j < field.size(); ++j) {
            worst = std::max(worst, std::abs(ab[j] - a_plus_b[j]));
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "semigroup_composition", worst, 1e-12, 0, "S(0.25)S(0.5) vs S(0.75) on a random 4096 field"));
    }
    {
        double worst = 0.0;
        const KernelSpec tighter{KernelNorm::Sqrt2PiMass, 1e-14};
        for (double t : {1e-4, 1e-2, 1.0}) {
            for (double x : {0.0, 1.0, 3.0}) {
                worst = std::max(worst, std::abs(eval_kernel(series, t, x) - eval_kernel(tighter, t, x)));
            }
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "kernel_self_convergence", worst, 1e-12, 0, "truncation_tol 1e-12 vs 1e-14"));
    }
    {
        SpectralWorkspace workspace(256);
        const Grid grid{256, 1e-3, 1};
        double worst = 0.0;
        Field constant(256, 1.0);
        Field spike(256, 0.0);
        spike[17] = 1.0 / grid.dx(); // unit-mass spike
        for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0}) {
            for (const Field* field : {&constant, &spike}) {
                worst = std::max(worst, smoothing_bound_check(t, *field, grid.dx(), workspace).ratio);
            }
        }
        outcome.verdicts.push_back(make_bound_verdict(
            "smoothing_ratio", worst, smoothing_ratio_bound(), 0,
            "sup S(t)f * sqrt(t)/|f|_L1 vs the calibrated constant"));
    }

    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_verify_noise(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    const Grid& grid = config.grid;
    const std::size_t replicas = config.ensemble.replicas;
    const std::uint64_t seed = config.ensemble.master_seed;

    const auto one = [](std::size_t, std::size_t) { return 1.0; };
    const auto cosx = [&grid](std::size_t, std::size_t j) { return std::cos(grid.x(j)); };
    const auto sinx = [&grid](std::size_t, std::size_t j) { return std::sin(grid.x(j)); };

    const auto to_verdict = [&](const char* name, const CovarianceReport& report) {
        Verdict verdict;
        verdict.name = name;
        verdict.statistic = report.empirical_cov;
        verdict.threshold = report.target;
        verdict.margin = 3.0 * report.std_err - std::abs(report.empirical_cov - report.target);
        verdict.replicas = report.replicas;
        verdict.status = report.pass ? VerdictStatus::Pass : VerdictStatus::Fail;
        std::ostringstream note;
        note << "target " << report.target << ", se " << report.std_err;
        verdict.note = note.str();
        return verdict;
    };

    outcome.verdicts.push_back(
        to_verdict("noise_isometry_unit", covariance_test(grid, one, one, replicas, seed)));
    outcome.verdicts.push_back(
        to_verdict("noise_orthogonal_modes", covariance_test(grid, cosx, sinx, replicas,
                                                             splitmix64_at(seed, 1))));
    outcome.verdicts.push_back(
        to_verdict("noise_cos_squared", covariance_test(grid, cosx, cosx, replicas,
                                                        splitmix64_at(seed, 2))));

    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_simulate(const SolverConfig& config, OutputWriter& writer,
                        const SimulateOptions& options) {
    RunOutcome outcome;
    const std::uint64_t seed = config.ensemble.master_seed;
    const TrajectoryRecord record = simulate(config, seed);
    writer.write("trajectory.csv", trajectory_csv(record));
    writer.write("events.csv", events_csv(record));

    if (options.snapshot_final) {
        std::ostringstream os(std::ios::binary);
        binio::put_u64(os, config.grid.n);
        binio::put_f64(os, config.grid.dt);
        binio::put_u64(os, record.final_index);
        binio::put_u64(os, seed);
        for (double v : record.final_field) binio::put_f64(os, v);
        writer.write("field_final.bin", os.str());
    }
    if (options.dump_noise) {
        std::ostringstream os(std::ios::binary);
        binio::put_u64(os, config.grid.n);
        binio::put_f64(os, config.grid.dt);
        binio::put_u64(os, config.grid.steps);
        binio::put_u64(os, seed);
        NoiseStream stream(config.grid, seed);
        NoiseSlice slice;
        for (std::size_t m = 0; m < config.grid.steps; ++m) {
            stream.next_slice(slice);
            for (double v : slice) binio::put_f64(os, v);
        }
        writer.write("noise.bin", os.str());
    }
    return outcome;
}

RunOutcome run_couple(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    const std::size_t replicas = config.ensemble.replicas;
    constexpr std::size_t kRefine = 4;

    Grid fine_grid = config.grid;
    fine_grid.dt = config.grid.dt / static_cast<double>(kRefine);
    fine_grid.steps = config.grid.steps * kRefine;
    SolverConfig fine_config = config;
    fine_config.grid = fine_grid;

    struct Row {
        OrderingReport coarse;
        OrderingReport fine;
    };
    std::vector<Row> rows(replicas);

    const int pool = resolve_workers(config.ensemble.workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
    for (long long r = 0; r < static_cast<long long>(replicas); ++r) {
        const auto idx = static_cast<std::size_t>(r);
        const std::uint64_t seed = substream_seed(config.ensemble.master_seed, idx);

        // Matched noise: the coarse increments are sums of the fine ones.
        NoiseStream stream(fine_grid, seed);
        std::vector<NoiseSlice> fine(fine_grid.steps);
        for (auto& slice : fine) stream.next_slice(slice);
        const CoupledRecord fine_run = simulate_coupled_with_noise(
            fine_config, seed, [&fine](std::size_t m, NoiseSlice& out) { out = fine[m]; });
        const CoupledRecord coarse_run = simulate_coupled_with_noise(
            config, seed, [&fine, &config](std::size_t m, NoiseSlice& out) {
                out.assign(config.grid.n, 0.0);
                for (std::size_t s = 0; s < kRefine; ++s) {
                    const NoiseSlice& piece = fine[m * kRefine + s];
                    for (std::size_t j = 0; j < out.size(); ++j) out[j] += piece[j];
                }
            });
        rows[idx] = {coarse_run.ordering, fine_run.ordering};
    }

    OrderingReport coarse_total;
    OrderingReport fine_total;
    std::ostringstream csv;
    csv << "replica,coarse_checked,coarse_violations,coarse_max,fine_checked,fine_violations,fine_max\n";
    for (std::size_t r = 0; r < replicas; ++r) {
        const Row& row = rows[r];
        coarse_total.checked_values += row.coarse.checked_values;
        coarse_total.violations += row.coarse.violations;
        coarse_total.max_violation = std::max(coarse_total.max_violation, row.coarse.max_violation);
        fine_total.checked_values += row.fine.checked_values;
        fine_total.violations += row.fine.violations;
        fine_total.max_violation = std::max(fine_total.max_violation, row.fine.max_violation);
        csv << r << ',' << row.coarse.checked_values << ',' << row.coarse.violations << ','
            << format_g17(row.coarse.max_violation) << ',' << row.fine.checked_values << ','
            << row.fine.violations << ',' << format_g17(row.fine.max_violation) << '\n';
    }
    writer.write("couple.csv", csv.str());

    Verdict verdict;
    verdict.name = "comparison_ordering_refinement";
    verdict.replicas = replicas;
    verdict.statistic = fine_total.rate();
    verdict.threshold = coarse_total.rate();
    verdict.margin = coarse_total.rate() - fine_total.rate();
    verdict.status = fine_total.rate() <= coarse_total.rate() ? VerdictStatus::Pass : VerdictStatus::Fail;
    std::ostringstream note;
    note << "violation rate " << coarse_total.rate() << " (dt) -> " << fine_total.rate()
         << " (dt/4); max magnitude " << coarse_total.max_violation << " -> "
         << fine_total.max_violation;
    verdict.note = note.str();
    outcome.verdicts.push_back(verdict);

    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_convolve(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    const Grid& grid = config.grid;
    const std::size_t replicas = config.ensemble.replicas;
    if (replicas < 2) throw ConfigError("convolve needs ensemble.replicas >= 2");
    const double level = config.convolution.phi_level;

    std::vector<double> samples(replicas, 0.0);
    const int pool = resolve_workers(config.ensemble.workers);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(pool)
#endif
    for (long long r = 0; r < static_cast<long long>(replicas); ++r) {
        const auto idx = static_cast<std::size_t>(r);
        const ConvolutionResult run =
            stochastic_convolution(grid, level, substream_seed(config.ensemble.master_seed, idx));
        samples[idx] = run.final_field.front();
    }
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= static_cast<double>(replicas);
    double variance = 0.0;
    for (double v : samples) variance += (v - mean) * (v - mean);
    variance /= static_cast<double>(replicas - 1);
    const double target = level * level * unit_convolution_variance(grid.horizon());
    const double se = variance * std::sqrt(2.0 / static_cast<double>(replicas - 1));

    Verdict var_verdict;
    var_verdict.name = "convolution_variance";
    var_verdict.statistic = variance;
    var_verdict.threshold = target;
    var_verdict.margin = 3.0 * se - std::abs(variance - target);
    var_verdict.replicas = replicas;
    var_verdict.status = std::abs(variance - target) <= 3.0 * se ? VerdictStatus::Pass : VerdictStatus::Fail;
    {
        std::ostringstream note;
        note << "Var Z(T,x0) " << variance << " vs kernel quadrature " << target << ", se " << se;
        var_verdict.note = note.str();
    }
    outcome.verdicts.push_back(var_verdict);

    const FactorizationRefinement refinement =
        factorization_refinement(grid, config.convolution, config.ensemble.master_seed);
    Verdict fact_verdict;
    fact_verdict.name = "factorization_refinement";
    fact_verdict.statistic = refinement.improvement;
    fact_verdict.threshold = 1.0;
    fact_verdict.margin = refinement.improvement - 1.0;
    fact_verdict.replicas = 1;
    fact_verdict.status = refinement.improvement > 1.0 ? VerdictStatus::Pass : VerdictStatus::Fail;
    {
        std::ostringstream note;
        note << "rel sup diff " << refinement.coarse.rel_diff() << " (dt) -> "
             << refinement.fine.rel_diff() << " (dt/2)";
        fact_verdict.note = note.str();
    }
    outcome.verdicts.push_back(fact_verdict);

    std::ostringstream csv;
    csv << "quantity,value\n";
    csv << "variance," << format_g17(variance) << '\n';
    csv << "variance_target," << format_g17(target) << '\n';
    csv << "variance_se," << format_g17(se) << '\n';
    csv << "factorization_rel_diff_coarse," << format_g17(refinement.coarse.rel_diff()) << '\n';
    csv << "factorization_rel_diff_fine," << format_g17(refinement.fine.rel_diff()) << '\n';
    csv << "factorization_improvement," << format_g17(refinement.improvement) << '\n';
    writer.write("convolution.csv", csv.str());

    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_verify_moment(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    const MomentScalingResult result = moment_scaling_check(
        config, config.ensemble.replicas, config.ensemble.master_seed, config.ensemble.workers);
    outcome.verdicts.push_back(result.verdict);

    // Exact linearity in the level: doubling phi scales sup|Z| by exactly 2.
    {
        const std::uint64_t seed = splitmix64_at(config.ensemble.master_seed, 0x4C494E);
        const ConvolutionResult base = stochastic_convolution(config.grid, 1.0, seed);
        const ConvolutionResult doubled = stochastic_convolution(config.grid, 2.0, seed);
        Verdict verdict;
        verdict.name = "moment_level_linearity";
        verdict.statistic = std::abs(doubled.sup_abs - 2.0 * base.sup_abs);
        verdict.threshold = 0.0;
        verdict.margin = -verdict.statistic;
        verdict.replicas = 1;
        verdict.status = verdict.statistic == 0.0 ? VerdictStatus::Pass : VerdictStatus::Fail;
        verdict.note = "sup|Z| at phi=2 vs 2 * sup|Z| at phi=1, same seed (exact)";
        outcome.verdicts.push_back(verdict);
    }

    writer.write("moment_scaling.csv", moment_rows_csv(result));
    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_verify_l1(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    SolverConfig cfg = config;
    cfg.experiment.process = Process::V;
    const EnsembleReport report =
        run_ensemble(cfg, cfg.ensemble.replicas, cfg.ensemble.master_seed, cfg.ensemble.workers);

    outcome.verdicts.push_back(submartingale_test(report));
    outcome.verdicts.push_back(doob_bound_check(report, cfg.doob_m, cfg.thresholds.epsilon,
                                                cfg.drift.alpha, cfg.grid.horizon()));
    outcome.verdicts.push_back(quadratic_variation_check(report, cfg.thresholds.l1_ceiling));

    writer.write("ensemble.csv", ensemble_csv(report));
    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_sweep_gamma(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    const std::vector<GammaSweepRow> rows =
        gamma_sweep(config, config.ensemble.replicas, config.ensemble.master_seed,
                    config.ensemble.workers);
    outcome.verdicts.push_back(gamma_monotonicity_check(rows));
    writer.write("gamma_sweep.csv", gamma_sweep_csv(rows));
    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

RunOutcome run_report(const SolverConfig& config, OutputWriter& writer) {
    RunOutcome outcome;
    SolverConfig cfg = config;
    cfg.experiment.process = Process::V;
    cfg.experiment.doubling = true;
    const EnsembleReport report =
        run_ensemble(cfg, cfg.ensemble.replicas, cfg.ensemble.master_seed, cfg.ensemble.workers);
    outcome.verdicts.push_back(doubling_finiteness_check(report));
    writer.write("ensemble.csv", ensemble_csv(report));
    writer.write("doubling_histogram.csv", doubling_histogram_csv(report.doubling));

    // How strongly the singular drift keeps the process away from zero:
    // fraction of trajectories ever dipping below each floor level.
    const std::vector<double> floors{0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01};
    std::ostringstream dips;
    dips << "epsilon,dipped,fraction\n";
    for (const FloorDipRow& row : floor_dip_fractions(report, floors)) {
        dips << format_g17(row.epsilon) << ',' << row.dipped << ',' << format_g17(row.fraction)
             << '\n';
    }
    writer.write("floor_dip_fractions.csv", dips.str());
    writer.write("verdicts.json", verdicts_json_text(outcome.verdicts));
    outcome.exit_code = exit_code_for(outcome.verdicts);
    return outcome;
}

} // namespace critheat
