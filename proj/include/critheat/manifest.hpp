#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "critheat/config.hpp"

namespace critheat {

/// Collects a run's output files into one directory and records their digests
/// in a manifest. The manifest's config snapshot plus master seed suffice to
/// reproduce every listed file bit-for-bit; timestamps are informational and
/// excluded from the digests.
class OutputWriter {
public:
    OutputWriter(std::filesystem::path directory, std::string subcommand,
                 const SolverConfig& config);

    /// Writes content under the run directory and records (path, bytes, digest).
    void write(const std::string& filename, std::string_view content);

    /// Finalizes manifest.json in the run directory; returns its path.
    std::filesystem::path finish();

    const std::filesystem::path& directory() const { return directory_; }
    const nlohmann::ordered_json& outputs() const { return outputs_; }

private:
    std::filesystem::path directory_;
    std::string subcommand_;
    nlohmann::ordered_json config_snapshot_;
    std::uint64_t master_seed_;
    std::string started_at_;
    nlohmann::ordered_json outputs_ = nlohmann::ordered_json::array();
};

std::string iso8601_utc_now();

} // namespace critheat
