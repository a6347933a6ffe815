#include "critheat/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace critheat {

const char* stop_kind_name(StopKind kind) {
    switch (kind) {
    case StopKind::InfFloor: return "inf_floor";
    case StopKind::SupCeiling: return "sup_ceiling";
    case StopKind::L1Ceiling: return "l1_ceiling";
    case StopKind::Explosion: return "explosion";
    }
    return "unknown";
}

void validate_trackers(const TrackerSet& trackers) {
    if (!(trackers.epsilon > 0.0) || !(trackers.epsilon < 1.0)) {
        throw std::invalid_argument("thresholds.epsilon must lie in (0,1)");
    }
    if (!(trackers.l1_ceiling > 0.0)) {
        throw std::invalid_argument("thresholds.m must be > 0");
    }
    if (!(trackers.explosion_ceiling > 1.0)) {
        throw std::invalid_argument("thresholds.n_max must be > 1");
    }
    for (double level : trackers.sup_levels) {
        if (!(level > 1.0) || level > trackers.explosion_ceiling) {
            throw std::invalid_argument("thresholds.n_levels must satisfy 1 < n <= n_max");
        }
    }
}

ThresholdTrackers::ThresholdTrackers(const TrackerSet& trackers, bool track_inf_floor)
    : trackers_(trackers), sup_fired_(trackers.sup_levels.size(), false),
      inf_fired_(!track_inf_floor) {
    validate_trackers(trackers_);
}

std::vector<StopEvent> ThresholdTrackers::update(const StateView& state) {
    if (last_index_) {
        if (state.t_index != *last_index_ + 1) {
            throw std::logic_error("ThresholdTrackers: states must arrive at consecutive indices");
        }
    } else if (state.t_index != 0) {
        throw std::logic_error("ThresholdTrackers: first state must have index 0");
    }
    last_index_ = state.t_index;

    std::vector<StopEvent> fired;
    const auto record = [&](StopKind kind, double threshold, double trigger) {
        StopEvent event{kind, threshold, state.t_index, trigger, state.l1, state.linf, state.qv};
        events_.push_back(event);
        fired.push_back(event);
    };

    if (!explosion_fired_ && (!state.finite || state.linf >= trackers_.explosion_ceiling)) {
        explosion_fired_ = true;
        explosion_index_ = state.t_index;
        record(StopKind::Explosion, trackers_.explosion_ceiling, state.linf);
    }
    if (!inf_fired_ && state.min <= trackers_.epsilon) {
        inf_fired_ = true;
        inf_floor_index_ = state.t_index;
        record(StopKind::InfFloor, trackers_.epsilon, state.min);
    }
    if (!l1_fired_ && state.l1 > trackers_.l1_ceiling) {
        l1_fired_ = true;
        l1_ceiling_index_ = state.t_index;
        record(StopKind::L1Ceiling, trackers_.l1_ceiling, state.l1);
    }
    for (std::size_t i = 0; i < trackers_.sup_levels.size(); ++i) {
        if (!sup_fired_[i] && state.linf >= trackers_.sup_levels[i]) {
            sup_fired_[i] = true;
            record(StopKind::SupCeiling, trackers_.sup_levels[i], state.linf);
        }
    }
    return fired;
}

void DoublingLog::update(std::size_t t_index, double linf) {
    if (finished_) return;
    if (!initialized_) {
        if (linf >= 2.0) {
            // Largest m with 2^m <= linf; the paper's exact-level condition is
            // replaced by the crossed level on the grid.
            level_ = static_cast<int>(std::floor(std::log2(linf)));
            initialized_ = true;
            entries_.push_back({DoublingEvent::Kind::Origin, t_index, level_, linf});
        }
        return;
    }
    const double upper = std::ldexp(1.0, level_ + 1); // 2^{m+1}
    const double lower = std::ldexp(1.0, level_ - 1); // 2^{m-1}
    if (linf >= upper) {
        ++level_;
        entries_.push_back({DoublingEvent::Kind::Double, t_index, level_, linf});
    } else if (level_ > 1 && linf <= lower) {
        --level_;
        entries_.push_back({DoublingEvent::Kind::Halve, t_index, level_, linf});
    }
}

void DoublingLog::finish(std::size_t t_index) {
    if (finished_) return;
    finished_ = true;
    entries_.push_back({DoublingEvent::Kind::Sentinel, t_index, 0, 0.0});
}

std::size_t DoublingLog::double_count() const {
    std::size_t count = 0;
    for (const auto& entry : entries_) {
        if (entry.kind == DoublingEvent::Kind::Double) ++count;
    }
    return count;
}

int DoublingLog::max_level() const {
    int peak = 0;
    for (const auto& entry : entries_) {
        if (entry.kind != DoublingEvent::Kind::Sentinel) peak = std::max(peak, entry.level);
    }
    return peak;
}

DoublingStats doubling_statistics(std::span<const DoublingLog> logs) {
    DoublingStats stats;
    stats.trajectories = logs.size();
    for (const DoublingLog& log : logs) {
        for (const auto& entry : log.entries()) {
            if (entry.kind == DoublingEvent::Kind::Double) {
                ++stats.doubles_per_level[entry.level - 1];
                ++stats.total_doubles;
            }
        }
        stats.max_level = std::max(stats.max_level, log.max_level());
    }
    return stats;
}

DoublingStats merge_doubling_counts(std::span<const std::map<int, std::size_t>> counts,
                                    std::span<const std::size_t> totals,
                                    std::span<const int> max_levels) {
    DoublingStats stats;
    stats.trajectories = counts.size();
    for (const auto& per_level : counts) {
        for (const auto& [level, count] : per_level) {
            stats.doubles_per_level[level] += count;
        }
    }
    for (std::size_t total : totals) stats.total_doubles += total;
    for (int level : max_levels) stats.max_level = std::max(stats.max_level, level);
    return stats;
}

} // namespace critheat
