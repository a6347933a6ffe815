#pragma once

#include <span>
#include <string>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/ensemble.hpp"
#include "critheat/manifest.hpp"

namespace critheat {

/// Result of one experiment pipeline: its verdicts and the process exit code
/// (0 all pass/vacuous, 1 any fail or inconclusive).
struct RunOutcome {
    std::vector<Verdict> verdicts;
    int exit_code = 0;
};

struct SimulateOptions {
    bool dump_noise = false;
    bool snapshot_final = false;
};

int exit_code_for(std::span<const Verdict> verdicts);
std::string verdicts_json_text(std::span<const Verdict> verdicts);

/// Deterministic heat-kernel checks: L1 mass for both normalizations, the
/// explicit sup-norm envelopes, positivity, symmetry, semigroup composition,
/// series self-convergence, and the calibrated smoothing ratio.
RunOutcome run_verify_kernel(const SolverConfig& config, OutputWriter& writer);

/// White-noise covariance identity: isometry of the unit integrand plus
/// orthogonal and cos^2 covariance targets.
RunOutcome run_verify_noise(const SolverConfig& config, OutputWriter& writer);

/// Single trajectory of the configured process.
RunOutcome run_simulate(const SolverConfig& config, OutputWriter& writer,
                        const SimulateOptions& options = {});

/// Coupled (u, v, v_minus) ordering with a 4x time-step refinement on matched
/// noise; the violation rate must not grow under refinement.
RunOutcome run_couple(const SolverConfig& config, OutputWriter& writer);

/// Stochastic convolution: pointwise variance against the kernel-quadrature
/// target, plus the factorization reconstruction refinement study.
RunOutcome run_convolve(const SolverConfig& config, OutputWriter& writer);

/// Bounded-ratio moment scaling of E sup|Z|^p across the horizon grid, plus
/// the exact level-linearity cross-check.
RunOutcome run_verify_moment(const SolverConfig& config, OutputWriter& writer);

/// L1 ensemble verifiers: stopped-mean monotonicity, the maximal-inequality
/// bound, and the quadratic-variation bound.
RunOutcome run_verify_l1(const SolverConfig& config, OutputWriter& writer);

/// Explosion frequency across the gamma grid with common random numbers.
RunOutcome run_sweep_gamma(const SolverConfig& config, OutputWriter& writer);

/// Reference ensemble with doubling statistics and the finiteness check.
RunOutcome run_report(const SolverConfig& config, OutputWriter& writer);

} // namespace critheat
