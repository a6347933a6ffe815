#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "critheat/ensemble.hpp"
#include "critheat/grid.hpp"
#include "critheat/solver.hpp"

namespace critheat {

/// Shortest round-trippable decimal rendering (%.17g); all CSV floats use it
/// so outputs are bit-stable and diff-able.
std::string format_g17(double v);

std::uint64_t fnv1a64(std::string_view bytes);

void write_text_file(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/// Full-field dump: little-endian header (u64 N, f64 dt, u64 step_index,
/// u64 seed) followed by N f64 samples — same header layout as noise dumps.
void write_field_snapshot(const std::filesystem::path& path, const Grid& grid,
                          std::size_t step_index, std::uint64_t seed, const Field& field);

struct FieldSnapshot {
    Grid grid;
    std::size_t step_index = 0;
    std::uint64_t seed = 0;
    Field field;
};

FieldSnapshot read_field_snapshot(const std::filesystem::path& path);

/// Trajectory CSV: t, l1, linf, qv_accum, events_fired.
std::string trajectory_csv(const TrajectoryRecord& record);

/// Event log CSV: kind, threshold, level, t_index, trigger_value. Stop events
/// carry level 0; doubling entries carry their dyadic level.
std::string events_csv(const TrajectoryRecord& record);

/// Ensemble CSV: one row per replica.
std::string ensemble_csv(const EnsembleReport& report);

std::string doubling_histogram_csv(const DoublingStats& stats);

std::string gamma_sweep_csv(std::span<const GammaSweepRow> rows);

std::string moment_rows_csv(const MomentScalingResult& result);

} // namespace critheat
