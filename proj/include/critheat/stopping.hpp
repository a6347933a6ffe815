#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace critheat {

enum class StopKind {
    InfFloor,    // first index with min field <= epsilon
    SupCeiling,  // first index with sup|field| >= n (one tracker per level)
    L1Ceiling,   // first index with |field|_{L1} > M
    Explosion,   // sup|field| >= n_max or a non-finite value appeared
};

const char* stop_kind_name(StopKind kind);

/// One stopping-time firing, with the trajectory caches snapshotted at the
/// firing index so stopped functionals can be reconstructed exactly.
struct StopEvent {
    StopKind kind;
    double threshold = 0.0;
    std::size_t t_index = 0;
    double trigger_value = 0.0; // the norm that crossed
    double l1 = 0.0;
    double linf = 0.0;
    double qv = 0.0;
};

/// Threshold levels for the tracked stopping times. Invariant:
/// 0 < epsilon < 1 < min(sup_levels) <= explosion_ceiling, l1_ceiling > 0.
struct TrackerSet {
    double epsilon = 0.5;
    double l1_ceiling = 10.0;
    std::vector<double> sup_levels;      // optional extra sup-norm ceilings
    double explosion_ceiling = 1e6;
};

void validate_trackers(const TrackerSet& trackers);

/// Per-step snapshot handed to the trackers (caches of one TrajectoryState).
struct StateView {
    std::size_t t_index = 0;
    double l1 = 0.0;
    double linf = 0.0;
    double min = 0.0;
    double qv = 0.0;
    bool finite = true;
};

/// First-crossing detector for all configured thresholds. Events are detected
/// on grid values only; a tie at exactly the threshold fires (closed
/// threshold, except the strict ">" of the L1 ceiling). Each tracker fires at
/// most once and never consults states after its own firing. States must
/// arrive at consecutive indices starting from 0.
class ThresholdTrackers {
public:
    /// track_inf_floor = false disables the floor tracker (the base process
    /// in a coupled run takes signed values; the floor belongs to the
    /// nonnegative envelopes).
    explicit ThresholdTrackers(const TrackerSet& trackers, bool track_inf_floor = true);

    /// Feeds one state; returns the events fired at this index (possibly
    /// several). Throws std::logic_error on out-of-order indices.
    std::vector<StopEvent> update(const StateView& state);

    const std::vector<StopEvent>& events() const { return events_; }
    std::optional<std::size_t> inf_floor_index() const { return inf_floor_index_; }
    std::optional<std::size_t> l1_ceiling_index() const { return l1_ceiling_index_; }
    std::optional<std::size_t> explosion_index() const { return explosion_index_; }
    bool exploded() const { return explosion_index_.has_value(); }

private:
    TrackerSet trackers_;
    std::vector<bool> sup_fired_;
    bool inf_fired_ = false;
    bool l1_fired_ = false;
    bool explosion_fired_ = false;
    std::optional<std::size_t> inf_floor_index_;
    std::optional<std::size_t> l1_ceiling_index_;
    std::optional<std::size_t> explosion_index_;
    std::optional<std::size_t> last_index_;
    std::vector<StopEvent> events_;
};

/// Doubling/halving ladder of the sup norm across dyadic levels 2^m, m >= 1.
struct DoublingEvent {
    enum class Kind { Origin, Double, Halve, Sentinel };
    Kind kind = Kind::Origin;
    std::size_t t_index = 0;
    int level = 0;      // level m at this event (|v| near 2^m); 0 for the sentinel
    double value = 0.0; // sup norm at the event
};

/// Tracks the first time the sup norm reaches any dyadic level (the origin),
/// then each first crossing of the adjacent levels 2^{m+1} (double) or
/// 2^{m-1} (halve). Halving is suppressed at level 1: from there only the
/// upward exit is tracked. Level moves by exactly +-1 per recorded event.
class DoublingLog {
public:
    void update(std::size_t t_index, double linf);

    /// Appends the end-of-trajectory sentinel. Idempotent.
    void finish(std::size_t t_index);

    const std::vector<DoublingEvent>& entries() const { return entries_; }
    bool initialized() const { return initialized_; }
    int current_level() const { return level_; }
    std::size_t double_count() const;
    int max_level() const;

private:
    std::vector<DoublingEvent> entries_;
    bool initialized_ = false;
    bool finished_ = false;
    int level_ = 0;
};

struct DoublingStats {
    std::map<int, std::size_t> doubles_per_level; // keyed by the level doubled FROM
    std::size_t total_doubles = 0;
    int max_level = 0;
    std::size_t trajectories = 0;
};

DoublingStats doubling_statistics(std::span<const DoublingLog> logs);

/// Merge of per-replica double counts (same keying as DoublingStats).
DoublingStats merge_doubling_counts(std::span<const std::map<int, std::size_t>> counts,
                                    std::span<const std::size_t> totals,
                                    std::span<const int> max_levels);

} // namespace critheat
