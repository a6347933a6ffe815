#include "critheat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "critheat/binio.hpp"

namespace critheat {

std::string format_g17(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ull;
    }
    return hash;
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    std::ostringstream buffer;
    buffer << is.rdbuf();
    return buffer.str();
}

void write_field_snapshot(const std::filesystem::path& path, const Grid& grid,
                          std::size_t step_index, std::uint64_t seed, const Field& field) {
    if (field.size() != grid.n) {
        throw std::invalid_argument("write_field_snapshot: field size mismatch");
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
    binio::put_u64(os, grid.n);
    binio::put_f64(os, grid.dt);
    binio::put_u64(os, step_index);
    binio::put_u64(os, seed);
    for (double v : field) binio::put_f64(os, v);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

FieldSnapshot read_field_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open for reading: " + path.string());
    FieldSnapshot snapshot;
    snapshot.grid.n = binio::get_u64(is);
    snapshot.grid.dt = binio::get_f64(is);
    snapshot.step_index = binio::get_u64(is);
    snapshot.grid.steps = std::max<std::size_t>(snapshot.step_index, 1);
    snapshot.seed = binio::get_u64(is);
    snapshot.field.assign(snapshot.grid.n, 0.0);
    for (double& v : snapshot.field) v = binio::get_f64(is);
    if (!is) throw std::runtime_error("truncated snapshot: " + path.string());
    return snapshot;
}

std::string trajectory_csv(const TrajectoryRecord& record) {
    std::ostringstream os;
    os << "t,l1,linf,qv_accum,events_fired\n";
    for (const SamplePoint& point : record.series) {
        os << format_g17(point.t) << ',' << format_g17(point.l1) << ',' << format_g17(point.linf)
           << ',' << format_g17(point.qv) << ',' << point.events_fired << '\n';
    }
    return os.str();
}

std::string events_csv(const TrajectoryRecord& record) {
    std::ostringstream os;
    os << "kind,threshold,level,t_index,trigger_value\n";
    for (const StopEvent& event : record.events) {
        os << stop_kind_name(event.kind) << ',' << format_g17(event.threshold) << ",0,"
           << event.t_index << ',' << format_g17(event.trigger_value) << '\n';
    }
    for (const DoublingEvent& entry : record.doubling.entries()) {
        const char* kind = "doubling_origin";
        switch (entry.kind) {
        case DoublingEvent::Kind::Origin: kind = "doubling_origin"; break;
        case DoublingEvent::Kind::Double: kind = "doubling_double"; break;
        case DoublingEvent::Kind::Halve: kind = "doubling_halve"; break;
        case DoublingEvent::Kind::Sentinel: kind = "doubling_sentinel"; break;
        }
        const double threshold = entry.kind == DoublingEvent::Kind::Sentinel
                                     ? 0.0
                                     : std::ldexp(1.0, entry.level);
        os << kind << ',' << format_g17(threshold) << ',' << entry.level << ',' << entry.t_index
           << ',' << format_g17(entry.value) << '\n';
    }
    return os.str();
}

namespace {

std::string optional_index(const std::optional<std::size_t>& index) {
    return index ? std::to_string(*index) : "-1";
}

} // namespace

std::string ensemble_csv(const EnsembleReport& report) {
    std::ostringstream os;
    os << "replica,seed,status,final_index,final_l1,final_linf,final_qv,"
          "sup_i_stopped,qv_stopped,inf_floor_index,l1_ceiling_index,explosion_index,"
          "doubling_total,doubling_max_level\n";
    for (const ReplicaSummary& r : report.replicas) {
        os << r.replica << ',' << r.seed << ',' << trajectory_status_name(r.status) << ','
           << r.final_index << ',' << format_g17(r.final_l1) << ',' << format_g17(r.final_linf)
           << ',' << format_g17(r.final_qv) << ',' << format_g17(r.sup_i_stopped) << ','
           << format_g17(r.qv_stopped) << ',' << optional_index(r.inf_floor_index) << ','
           << optional_index(r.l1_ceiling_index) << ',' << optional_index(r.explosion_index)
           << ',' << r.doubling_total << ',' << r.doubling_max_level << '\n';
    }
    return os.str();
}

std::string doubling_histogram_csv(const DoublingStats& stats) {
    std::ostringstream os;
    os << "level,double_events\n";
    for (const auto& [level, count] : stats.doubles_per_level) {
        os << level << ',' << count << '\n';
    }
    return os.str();
}

std::string gamma_sweep_csv(std::span<const GammaSweepRow> rows) {
    std::ostringstream os;
    os << "gamma,replicas,explosions,frequency,wilson_low,wilson_high\n";
    for (const GammaSweepRow& row : rows) {
        os << format_g17(row.gamma) << ',' << row.replicas << ',' << row.explosions << ','
           << format_g17(row.frequency) << ',' << format_g17(row.wilson_low) << ','
           << format_g17(row.wilson_high) << '\n';
    }
    return os.str();
}

std::string moment_rows_csv(const MomentScalingResult& result) {
    std::ostringstream os;
    os << "horizon,mean_sup_p,envelope,ratio\n";
    for (const MomentScaleRow& row : result.rows) {
        os << format_g17(row.horizon) << ',' << format_g17(row.mean_sup_p) << ','
           << format_g17(row.envelope) << ',' << format_g17(row.ratio) << '\n';
    }
    return os.str();
}

} // namespace critheat
