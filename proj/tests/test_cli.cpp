// Black-box tests of the critheat binary: exit-code contract, output
// determinism, and manifest replay. Invoked as: test_cli <path-to-binary>
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "critheat/io.hpp"

namespace {

std::string g_binary;
std::filesystem::path g_root;

int run_cli(const std::string& args) {
    const std::string command = g_binary + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path fresh(const std::string& name) {
    const auto dir = g_root / name;
    std::filesystem::remove_all(dir);
    return dir;
}

nlohmann::json output_digests(const std::filesystem::path& dir) {
    const auto manifest = nlohmann::json::parse(critheat::read_text_file(dir / "manifest.json"));
    return manifest.at("outputs");
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    os << content;
}

} // namespace

TEST_CASE("usage and config errors exit with code 2") {
    CHECK(run_cli("") == 2);
    CHECK(run_cli("no-such-subcommand") == 2);
    CHECK(run_cli("simulate --config /nonexistent.ini") == 2);
    const auto bad = g_root / "bad.ini";
    write_file(bad, "[drift]\nalpha = 2.5\n");
    CHECK(run_cli("simulate --config " + bad.string()) == 2);
    const auto unknown = g_root / "unknown.ini";
    write_file(unknown, "[grid]\nwhatever = 3\n");
    CHECK(run_cli("simulate --config " + unknown.string()) == 2);
    CHECK(run_cli("simulate --set grid.n=48") == 2);
}

TEST_CASE("verify-kernel passes and writes verdicts plus a manifest") {
    const auto dir = fresh("vk");
    CHECK(run_cli("verify-kernel --out " + dir.string()) == 0);
    CHECK(std::filesystem::exists(dir / "verdicts.json"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    const auto verdicts = nlohmann::json::parse(critheat::read_text_file(dir / "verdicts.json"));
    CHECK(verdicts.is_array());
    for (const auto& verdict : verdicts) CHECK(verdict.at("status") == "pass");
}

TEST_CASE("simulate with a fixed seed is digest-stable across runs") {
    const std::string flags =
        " --seed 42 --set grid.steps=200 --set grid.dt=5e-4 --dump-noise --snapshot";
    const auto dir1 = fresh("sim1");
    const auto dir2 = fresh("sim2");
    CHECK(run_cli("simulate --out " + dir1.string() + flags) == 0);
    CHECK(run_cli("simulate --out " + dir2.string() + flags) == 0);
    CHECK(output_digests(dir1) == output_digests(dir2));
    CHECK(std::filesystem::exists(dir1 / "trajectory.csv"));
    CHECK(std::filesystem::exists(dir1 / "events.csv"));
    CHECK(std::filesystem::exists(dir1 / "noise.bin"));
    CHECK(std::filesystem::exists(dir1 / "field_final.bin"));
}

TEST_CASE("manifest replay reproduces identical digests") {
    const auto dir1 = fresh("replay1");
    const auto dir2 = fresh("replay2");
    const std::string flags = " --seed 7 --set grid.steps=150 --set thresholds.m=12.5";
    CHECK(run_cli("simulate --out " + dir1.string() + flags) == 0);
    CHECK(run_cli("simulate --out " + dir2.string() + " --from-manifest " +
                  (dir1 / "manifest.json").string()) == 0);
    CHECK(output_digests(dir1) == output_digests(dir2));
}

TEST_CASE("under-sampled verify-l1 is inconclusive and exits 1") {
    const auto dir = fresh("l1small");
    const int code = run_cli("verify-l1 --out " + dir.string() +
                             " --replicas 50 --set grid.steps=100 --set grid.dt=5e-4");
    CHECK(code == 1);
    const auto verdicts = nlohmann::json::parse(critheat::read_text_file(dir / "verdicts.json"));
    bool saw_inconclusive = false;
    for (const auto& verdict : verdicts) {
        saw_inconclusive |= verdict.at("status") == "inconclusive";
    }
    CHECK(saw_inconclusive);
}

TEST_CASE("worker-count flag does not change outputs") {
    const std::string flags =
        " --seed 11 --replicas 12 --set grid.steps=200 --set grid.dt=5e-4 --set grid.n=32";
    const auto dir1 = fresh("w1");
    const auto dir2 = fresh("w2");
    CHECK(run_cli("verify-l1 --out " + dir1.string() + flags + " --workers 1") == 1); // inconclusive
    CHECK(run_cli("verify-l1 --out " + dir2.string() + flags + " --workers 2") == 1);
    CHECK(output_digests(dir1) == output_digests(dir2));
}

int main(int argc, char** argv) {
    doctest::Context context;
    context.applyCommandLine(1, argv);
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <critheat-binary>\n");
        return 1;
    }
    g_binary = argv[1];
    g_root = std::filesystem::temp_directory_path() / "critheat_cli_test";
    std::filesystem::create_directories(g_root);
    const int rc = context.run();
    std::filesystem::remove_all(g_root);
    return rc;
}
