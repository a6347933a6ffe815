#include "critheat/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critheat {

void TrajectoryState::refresh_caches(double dx) {
    double abs_sum = 0.0;
    double abs_max = 0.0;
    double lowest = field.empty() ? 0.0 : field.front();
    bool ok = true;
    for (double v : field) {
        const double a = std::abs(v);
        abs_sum += a;
        if (a > abs_max) abs_max = a;
        if (v < lowest) lowest = v;
        ok = ok && std::isfinite(v);
    }
    l1 = abs_sum * dx;
    linf = abs_max;
    min = lowest;
    finite = ok;
}

StepCoefficients StepCoefficients::for_process(const SolverConfig& config, Process process) {
    StepCoefficients coeffs;
    coeffs.sigma = config.sigma;
    coeffs.clamp_n = config.clamp_n;
    coeffs.drift = config.drift;
    switch (process) {
    case Process::U:
        coeffs.sign = 1.0;
        coeffs.drift_on = false;
        break;
    case Process::V:
        coeffs.sign = 1.0;
        coeffs.drift_on = true;
        break;
    case Process::VMinus:
        coeffs.sign = -1.0;
        coeffs.noise_sign = -1.0;
        coeffs.drift_on = true;
        break;
    }
    return coeffs;
}

Stepper::Stepper(const Grid& grid, const StepCoefficients& coeffs)
    : grid_(grid), coeffs_(coeffs), workspace_(grid.n),
      decay_(mode_decay(grid.n, grid.dt)), forcing_(grid.n, 0.0) {
    validate_grid(grid);
    validate_sigma(coeffs.sigma);
    if (coeffs.drift_on) validate_drift(coeffs.drift);
}

void Stepper::step(TrajectoryState& state, std::span<const double> slice) {
    const std::size_t n = grid_.n;
    if (state.field.size() != n || slice.size() != n) {
        throw std::invalid_argument("step: field/slice size mismatch");
    }
    if (!state.finite) {
        throw std::runtime_error("step: non-finite input field");
    }
    const double dx = grid_.dx();
    const double dt = grid_.dt;
    const double inv_dx = coeffs_.noise_sign / dx;

    // Drift and noise coefficients are adapted: evaluated at the pre-step field.
    double qv_increment = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double w = state.field[j];
        const double sig = coeffs_.noise_coefficient(w);
        qv_increment += sig * sig;
        forcing_[j] = dt * coeffs_.drift_term(w) + sig * slice[j] * inv_dx;
    }
    state.qv_accum += qv_increment * dt * dx;

    workspace_.semigroup_apply_inplace(state.field, decay_);
    for (std::size_t j = 0; j < n; ++j) state.field[j] += forcing_[j];

    ++state.t_index;
    state.refresh_caches(dx);
}

const char* trajectory_status_name(TrajectoryStatus status) {
    switch (status) {
    case TrajectoryStatus::Completed: return "completed";
    case TrajectoryStatus::Exploded: return "exploded";
    case TrajectoryStatus::StoppedInfFloor: return "stopped_inf_floor";
    case TrajectoryStatus::StoppedL1Ceiling: return "stopped_l1_ceiling";
    }
    return "unknown";
}

std::vector<std::size_t> sample_marks(const Grid& grid, std::size_t stride) {
    std::vector<std::size_t> marks;
    for (std::size_t m = 0; m <= grid.steps; m += stride) marks.push_back(m);
    if (marks.back() != grid.steps) marks.push_back(grid.steps);
    return marks;
}

Field make_initial_field(const SolverConfig& config, Process process, std::uint64_t seed) {
    const Grid& grid = config.grid;
    Field u0(grid.n, config.experiment.initial_value);
    switch (config.experiment.initial) {
    case InitialKind::Constant:
        break;
    case InitialKind::Cosine:
        for (std::size_t j = 0; j < grid.n; ++j) {
            u0[j] += config.experiment.initial_amplitude * std::cos(grid.x(j));
        }
        break;
    case InitialKind::RandomTrig: {
        // Low-order trigonometric polynomial with seed-derived coefficients;
        // a separate substream keeps it independent of the driving noise.
        GaussianStream draws(splitmix64_at(seed, 0x494E4954ull));
        constexpr int kModes = 4;
        for (int k = 1; k <= kModes; ++k) {
            const double scale = config.experiment.initial_amplitude / static_cast<double>(k);
            const double a = scale * draws.next();
            const double b = scale * draws.next();
            for (std::size_t j = 0; j < grid.n; ++j) {
                const double x = grid.x(j);
                u0[j] += a * std::cos(k * x) + b * std::sin(k * x);
            }
        }
        break;
    }
    }
    switch (process) {
    case Process::U:
        return u0;
    case Process::V:
        for (double& v : u0) v = std::max(v, 1.0);
        return u0;
    case Process::VMinus:
        for (double& v : u0) v = std::max(-v, 1.0);
        return u0;
    }
    return u0;
}

namespace {

/// Shared per-trajectory bookkeeping: trackers, doubling ladder, the stopped
/// functionals, and stride sampling.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(const SolverConfig& config, bool track_floor)
        : config_(config),
          trackers_(config.thresholds, track_floor),
          marks_(sample_marks(config.grid, config.ensemble.stride)),
          track_floor_(track_floor) {}

    /// Feeds the state at its current index; returns true if the trajectory
    /// should terminate after this index.
    bool observe(const TrajectoryState& state, TrajectoryRecord& record) {
        const std::size_t m = state.t_index;
        const auto fired = trackers_.update(state.view());
        events_total_ += fired.size();
        record.max_linf = std::max(record.max_linf, state.linf);
        record.min_field = m == 0 ? state.min : std::min(record.min_field, state.min);

        const bool inf_before = fired_before(trackers_.inf_floor_index(), m);
        const bool l1_before = fired_before(trackers_.l1_ceiling_index(), m);
        const bool exploded_before = fired_before(trackers_.explosion_index(), m);

        // Stopped L1 process: frozen from the inf-floor/explosion index on
        // (inclusive of the firing index itself).
        if (!inf_before && !exploded_before) {
            i_current_ = state.l1;
            record.sup_i_stopped = std::max(record.sup_i_stopped, state.l1);
        }
        // Quadratic variation frozen at the L1 ceiling as well.
        if (!inf_before && !l1_before && !exploded_before) {
            record.qv_stopped = state.qv_accum;
        }
        // The dyadic ladder lives on [0, inf-floor ^ L1-ceiling].
        if (config_.experiment.doubling && !inf_before && !l1_before && !exploded_before) {
            record.doubling.update(m, state.linf);
        }

        while (next_mark_ < marks_.size() && marks_[next_mark_] == m) {
            record.series.push_back({m, config_.grid.time(m), state.l1, state.linf,
                                     state.qv_accum, events_total_});
            record.i_series.push_back(i_current_);
            ++next_mark_;
        }

        bool terminal = trackers_.exploded();
        if (config_.experiment.stop_on_inf_floor && trackers_.inf_floor_index()) terminal = true;
        if (config_.experiment.stop_on_l1_ceiling && trackers_.l1_ceiling_index()) terminal = true;
        return terminal;
    }

    void finalize(const TrajectoryState& state, TrajectoryRecord& record) {
        record.events = trackers_.events();
        record.final_index = state.t_index;
        record.final_field = state.field;
        record.final_l1 = state.l1;
        record.final_linf = state.linf;
        record.final_qv = state.qv_accum;
        if (config_.experiment.doubling) record.doubling.finish(state.t_index);

        // Terminated early: record the terminal sample and pad the stopped
        // L1 series so every replica spans the same mark grid.
        if (record.series.empty() || record.series.back().t_index != state.t_index) {
            record.series.push_back({state.t_index, config_.grid.time(state.t_index), state.l1,
                                     state.linf, state.qv_accum, events_total_});
        }
        while (record.i_series.size() < marks_.size()) record.i_series.push_back(i_current_);

        if (trackers_.exploded()) {
            record.status = TrajectoryStatus::Exploded;
        } else if (config_.experiment.stop_on_inf_floor && trackers_.inf_floor_index()) {
            record.status = TrajectoryStatus::StoppedInfFloor;
        } else if (config_.experiment.stop_on_l1_ceiling && trackers_.l1_ceiling_index()) {
            record.status = TrajectoryStatus::StoppedL1Ceiling;
        } else {
            record.status = TrajectoryStatus::Completed;
        }
    }

    void check_initial(const Field& field) const {
        if (track_floor_ && config_.thresholds.epsilon >= min_value(field)) {
            throw ConfigError("thresholds.epsilon must be below the initial field minimum");
        }
        if (config_.thresholds.explosion_ceiling <= sup_norm(field)) {
            throw ConfigError("thresholds.n_max must exceed the initial field sup");
        }
    }

private:
    static bool fired_before(const std::optional<std::size_t>& index, std::size_t m) {
        return index && *index < m;
    }

    const SolverConfig& config_;
    ThresholdTrackers trackers_;
    std::vector<std::size_t> marks_;
    std::size_t next_mark_ = 0;
    std::size_t events_total_ = 0;
    double i_current_ = 0.0;
    bool track_floor_;
};

TrajectoryRecord simulate_process(const SolverConfig& config, Process process,
                                  std::uint64_t seed, const SliceProvider& slices) {
    validate_grid(config.grid);
    TrajectoryRecord record;
    TrajectoryRecorder recorder(config, true);

    TrajectoryState state;
    state.field = make_initial_field(config, process, seed);
    state.refresh_caches(config.grid.dx());
    recorder.check_initial(state.field);

    Stepper stepper(config.grid, StepCoefficients::for_process(config, process));
    NoiseSlice slice;
    bool terminal = recorder.observe(state, record);
    for (std::size_t m = 1; m <= config.grid.steps && !terminal; ++m) {
        slices(m - 1, slice);
        stepper.step(state, slice);
        terminal = recorder.observe(state, record);
    }
    recorder.finalize(state, record);
    return record;
}

} // namespace

TrajectoryRecord simulate(const SolverConfig& config, std::uint64_t seed) {
    NoiseStream stream(config.grid, seed);
    return simulate_process(config, config.experiment.process, seed,
                            [&stream](std::size_t, NoiseSlice& out) { stream.next_slice(out); });
}

CoupledRecord simulate_coupled_with_noise(const SolverConfig& config, std::uint64_t seed,
                                          const SliceProvider& slices) {
    validate_grid(config.grid);
    const Grid& grid = config.grid;
    const double tol = config.experiment.tol_order;

    CoupledRecord record;
    TrajectoryRecorder rec_u(config, false);
    TrajectoryRecorder rec_v(config, true);
    TrajectoryRecorder rec_vm(config, true);

    TrajectoryState su;
    TrajectoryState sv;
    TrajectoryState svm;
    su.field = make_initial_field(config, Process::U, seed);
    sv.field = make_initial_field(config, Process::V, seed);
    svm.field = make_initial_field(config, Process::VMinus, seed);
    const double dx = grid.dx();
    su.refresh_caches(dx);
    sv.refresh_caches(dx);
    svm.refresh_caches(dx);
    rec_u.check_initial(su.field);
    rec_v.check_initial(sv.field);
    rec_vm.check_initial(svm.field);

    Stepper step_u(grid, StepCoefficients::for_process(config, Process::U));
    Stepper step_v(grid, StepCoefficients::for_process(config, Process::V));
    Stepper step_vm(grid, StepCoefficients::for_process(config, Process::VMinus));

    const auto check_ordering = [&]() {
        for (std::size_t j = 0; j < grid.n; ++j) {
            const double slack = std::min(sv.field[j] - su.field[j], su.field[j] + svm.field[j]);
            ++record.ordering.checked_values;
            if (slack < -tol) {
                ++record.ordering.violations;
                record.ordering.max_violation = std::max(record.ordering.max_violation, -slack);
            }
        }
    };

    NoiseSlice slice;
    bool terminal = false;
    terminal |= rec_u.observe(su, record.u);
    terminal |= rec_v.observe(sv, record.v);
    terminal |= rec_vm.observe(svm, record.v_minus);
    check_ordering();
    for (std::size_t m = 1; m <= grid.steps && !terminal; ++m) {
        slices(m - 1, slice);
        step_u.step(su, slice);
        step_v.step(sv, slice);
        step_vm.step(svm, slice);
        terminal |= rec_u.observe(su, record.u);
        terminal |= rec_v.observe(sv, record.v);
        terminal |= rec_vm.observe(svm, record.v_minus);
        check_ordering();
    }
    rec_u.finalize(su, record.u);
    rec_v.finalize(sv, record.v);
    rec_vm.finalize(svm, record.v_minus);

    record.status = TrajectoryStatus::Completed;
    for (const TrajectoryRecord* r : {&record.u, &record.v, &record.v_minus}) {
        if (r->status == TrajectoryStatus::Exploded) record.status = TrajectoryStatus::Exploded;
    }
    return record;
}

CoupledRecord simulate_coupled(const SolverConfig& config, std::uint64_t seed) {
    NoiseStream stream(config.grid, seed);
    return simulate_coupled_with_noise(config, seed,
                                       [&stream](std::size_t, NoiseSlice& out) { stream.next_slice(out); });
}

} // namespace critheat
