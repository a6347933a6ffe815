#include "critheat/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "critheat/io.hpp"
#include "critheat/version.hpp"

namespace critheat {

std::string iso8601_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buffer;
}

OutputWriter::OutputWriter(std::filesystem::path directory, std::string subcommand,
                           const SolverConfig& config)
    : directory_(std::move(directory)),
      subcommand_(std::move(subcommand)),
      config_snapshot_(config_to_json(config)),
      master_seed_(config.ensemble.master_seed),
      started_at_(iso8601_utc_now()) {
    std::filesystem::create_directories(directory_);
}

void OutputWriter::write(const std::string& filename, std::string_view content) {
    write_text_file(directory_ / filename, content);
    char digest[19];
    std::snprintf(digest, sizeof(digest), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(content)));
    nlohmann::ordered_json entry;
    entry["path"] = filename;
    entry["bytes"] = content.size();
    entry["fnv1a64"] = digest;
    outputs_.push_back(entry);
}

std::filesystem::path OutputWriter::finish() {
    nlohmann::ordered_json manifest;
    manifest["tool"] = kToolName;
    manifest["version"] = kToolVersion;
    manifest["subcommand"] = subcommand_;
    manifest["master_seed"] = master_seed_;
    manifest["started_at"] = started_at_;
    manifest["finished_at"] = iso8601_utc_now();
    manifest["config"] = config_snapshot_;
    manifest["outputs"] = outputs_;
    const std::filesystem::path path = directory_ / "manifest.json";
    write_text_file(path, manifest.dump(2) + "\n");
    return path;
}

} // namespace critheat
