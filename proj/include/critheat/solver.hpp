#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/coefficients.hpp"
#include "critheat/grid.hpp"
#include "critheat/heat_kernel.hpp"
#include "critheat/noise.hpp"
#include "critheat/stopping.hpp"

namespace critheat {

/// One trajectory's evolving state with cached norms and the running discrete
/// quadratic-variation integral sum_s sum_j sigma(field)^2 dt dx.
struct TrajectoryState {
    std::size_t t_index = 0;
    Field field;
    double l1 = 0.0;
    double linf = 0.0;
    double min = 0.0;
    double qv_accum = 0.0;
    bool finite = true;

    void refresh_caches(double dx);
    StateView view() const { return {t_index, l1, linf, min, qv_accum, finite}; }
};

/// Coefficients resolved for one process: the clamped noise coefficient
/// sigma_n evaluated at sign*w (sign = -1 for the lower comparison process)
/// and optionally the clamped singular drift f_eps. noise_sign flips the
/// driving increments: the lower process must see the negated stream for the
/// pathwise sandwich -v_minus <= u <= v to be a comparison-principle
/// statement (-v_minus then carries the same coefficient function as u).
struct StepCoefficients {
    SigmaFamily sigma;
    double clamp_n = 1e6;
    double sign = 1.0;
    double noise_sign = 1.0;
    bool drift_on = false;
    DriftSpec drift;

    static StepCoefficients for_process(const SolverConfig& config, Process process);

    double noise_coefficient(double w) const { return sigma_clamped(sigma, clamp_n, sign * w); }
    double drift_term(double w) const { return drift_on ? drift_clamped(drift, w) : 0.0; }
};

/// Spectral exponential-Euler stepper: the linear heat flow is applied exactly
/// per Fourier mode, then drift and noise are added pointwise, both evaluated
/// at the pre-step field (explicit, post-smoothing):
///   w' = S(dt) w + dt * f_eps(w) + sigma_n(w) * dW / dx.
/// Owns the FFT workspace for its grid; one instance per trajectory.
class Stepper {
public:
    Stepper(const Grid& grid, const StepCoefficients& coeffs);

    /// Advances one step. Throws std::runtime_error on non-finite input;
    /// a non-finite output is flagged in the state, not thrown.
    void step(TrajectoryState& state, std::span<const double> slice);

    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    StepCoefficients coeffs_;
    SpectralWorkspace workspace_;
    std::vector<double> decay_;
    std::vector<double> forcing_;
};

enum class TrajectoryStatus { Completed, Exploded, StoppedInfFloor, StoppedL1Ceiling };

const char* trajectory_status_name(TrajectoryStatus status);

struct SamplePoint {
    std::size_t t_index = 0;
    double t = 0.0;
    double l1 = 0.0;
    double linf = 0.0;
    double qv = 0.0;
    std::size_t events_fired = 0;  // cumulative
};

struct TrajectoryRecord {
    std::vector<SamplePoint> series;   // raw samples at stride marks until termination
    std::vector<StopEvent> events;
    DoublingLog doubling;
    TrajectoryStatus status = TrajectoryStatus::Completed;
    std::size_t final_index = 0;
    double final_l1 = 0.0;
    double final_linf = 0.0;
    double final_qv = 0.0;
    /// max of the stopped L1 process over [0, inf-floor ^ explosion ^ horizon]
    double sup_i_stopped = 0.0;
    /// qv frozen at the first of L1-ceiling, inf-floor, explosion, horizon
    double qv_stopped = 0.0;
    /// running max of the sup norm over the whole trajectory
    double max_linf = 0.0;
    /// running min of the field over the whole trajectory
    double min_field = 0.0;
    /// stopped L1 at every stride mark (full grid, frozen past its stop)
    std::vector<double> i_series;
    Field final_field;
};

/// Mark indices 0, stride, 2*stride, ..., plus the final step.
std::vector<std::size_t> sample_marks(const Grid& grid, std::size_t stride);

/// Initial data for the base field u(0,.): constant, constant + amplitude*cos x,
/// or a random trigonometric polynomial drawn from the run's seed. The
/// comparison processes transform it (max{u0,1} resp. max{-u0,1}).
Field make_initial_field(const SolverConfig& config, Process process, std::uint64_t seed);

/// Runs one trajectory of the configured process. Throws ConfigError when the
/// thresholds are inconsistent with the initial data (epsilon >= min initial
/// for floor-tracked processes, n_max <= sup initial).
TrajectoryRecord simulate(const SolverConfig& config, std::uint64_t seed);

/// Pathwise ordering statistics for the coupled triple.
struct OrderingReport {
    std::size_t checked_values = 0;
    std::size_t violations = 0;    // cells with min(v-u, u+v_minus) < -tol_order
    double max_violation = 0.0;    // largest negative slack magnitude
    double rate() const {
        return checked_values ? static_cast<double>(violations) / static_cast<double>(checked_values) : 0.0;
    }
};

struct CoupledRecord {
    TrajectoryRecord u;
    TrajectoryRecord v;
    TrajectoryRecord v_minus;
    OrderingReport ordering;
    TrajectoryStatus status = TrajectoryStatus::Completed;
};

using SliceProvider = std::function<void(std::size_t step, NoiseSlice& out)>;

/// Advances u, v, v_minus in lockstep under one shared noise stream and
/// reports pathwise ordering violations beyond tol_order.
CoupledRecord simulate_coupled(const SolverConfig& config, std::uint64_t seed);

/// As above with caller-supplied noise (used for refinement coupling, where
/// the coarse increments are sums of fine ones).
CoupledRecord simulate_coupled_with_noise(const SolverConfig& config, std::uint64_t seed,
                                          const SliceProvider& slices);

} // namespace critheat
