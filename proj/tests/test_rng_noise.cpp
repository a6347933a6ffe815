#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <vector>

#include "critheat/noise.hpp"
#include "critheat/rng.hpp"

using namespace critheat;

TEST_CASE("generators are deterministic and substreams are distinct") {
    Xoshiro256pp a(42);
    Xoshiro256pp b(42);
    for (int i = 0; i < 64; ++i) CHECK(a.next() == b.next());

    CHECK(substream_seed(1234, 0) != substream_seed(1234, 1));
    CHECK(substream_seed(1234, 0) != substream_seed(1235, 0));

    GaussianStream g1(7);
    GaussianStream g2(7);
    for (int i = 0; i < 65; ++i) CHECK(g1.next() == g2.next());
}

TEST_CASE("gaussian moments") {
    GaussianStream draws(99);
    const std::size_t n = 400000;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = draws.next();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("same seed gives bit-identical slices") {
    const Grid grid{64, 1e-3, 16};
    NoiseStream s1(grid, 2024);
    NoiseStream s2(grid, 2024);
    for (std::size_t m = 0; m < grid.steps; ++m) {
        CHECK(s1.next_slice() == s2.next_slice());
    }
}

TEST_CASE("cell variance is dt*dx and the mean is centered") {
    const Grid grid{64, 1e-3, 1};
    const double cell_var = grid.dt * grid.dx();
    double sum = 0.0;
    double sum_sq = 0.0;
    const std::size_t slices = 20000;
    NoiseSlice slice;
    NoiseStream stream(grid, 5150);
    for (std::size_t m = 0; m < slices; ++m) {
        stream.next_slice(slice);
        for (double v : slice) {
            sum += v;
            sum_sq += v * v;
        }
    }
    const double n = static_cast<double>(slices * grid.n);
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 3.0 * std::sqrt(cell_var / n));
    CHECK(std::abs(var - cell_var) < 3.0 * cell_var * std::sqrt(2.0 / n));
}

TEST_CASE("walsh integral: zero integrand, linearity, shape errors") {
    const Grid grid{32, 1e-2, 8};
    NoiseStream stream(grid, 11);
    std::vector<NoiseSlice> slices;
    for (std::size_t m = 0; m < grid.steps; ++m) slices.push_back(stream.next_slice());

    CHECK(walsh_integral(slices, [](std::size_t, std::size_t) { return 0.0; }) == 0.0);

    const auto phi = [&grid](std::size_t s, std::size_t j) {
        return std::sin(grid.x(j)) + 0.25 * static_cast<double>(s);
    };
    const double once = walsh_integral(slices, phi);
    const double twice = walsh_integral(slices, [&phi](std::size_t s, std::size_t j) {
        return 2.0 * phi(s, j);
    });
    CHECK(twice == doctest::Approx(2.0 * once).epsilon(1e-14));

    auto bad = slices;
    bad.back().pop_back();
    CHECK_THROWS_AS(walsh_integral(bad, phi), std::invalid_argument);
}

TEST_CASE("covariance targets: unit isometry, orthogonal modes, cos^2") {
    const Grid grid{32, 1.0 / 64.0, 64}; // T = 1
    const auto one = [](std::size_t, std::size_t) { return 1.0; };
    const auto cosx = [&grid](std::size_t, std::size_t j) { return std::cos(grid.x(j)); };
    const auto sinx = [&grid](std::size_t, std::size_t j) { return std::sin(grid.x(j)); };

    const CovarianceReport unit = covariance_test(grid, one, one, 1500, 1);
    CHECK(unit.target == doctest::Approx(kTwoPi).epsilon(1e-12));
    CHECK(unit.pass);

    const CovarianceReport orthogonal = covariance_test(grid, cosx, sinx, 1500, 2);
    CHECK(orthogonal.target == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(orthogonal.pass);

    const CovarianceReport cos_sq = covariance_test(grid, cosx, cosx, 1500, 3);
    CHECK(cos_sq.target == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(cos_sq.pass);

    CHECK_THROWS_AS(covariance_test(grid, one, one, 50, 1), std::invalid_argument);
}

TEST_CASE("disjoint space-time supports decorrelate") {
    const Grid grid{32, 1.0 / 64.0, 64};
    const auto early = [&grid](std::size_t s, std::size_t) {
        return s < grid.steps / 2 ? 1.0 : 0.0;
    };
    const auto late = [&grid](std::size_t s, std::size_t) {
        return s >= grid.steps / 2 ? 1.0 : 0.0;
    };
    const CovarianceReport report = covariance_test(grid, early, late, 1500, 4);
    CHECK(report.target == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(report.pass);
}

TEST_CASE("noise dump round-trips bit for bit") {
    const Grid grid{16, 2.5e-3, 12};
    NoiseStream stream(grid, 777);
    std::vector<NoiseSlice> slices;
    for (std::size_t m = 0; m < grid.steps; ++m) slices.push_back(stream.next_slice());

    const auto path = std::filesystem::temp_directory_path() / "critheat_noise_test.bin";
    write_noise_dump(path, grid, 777, slices);
    const NoiseDump dump = read_noise_dump(path);
    CHECK(dump.grid.n == grid.n);
    CHECK(dump.grid.dt == grid.dt);
    CHECK(dump.grid.steps == grid.steps);
    CHECK(dump.seed == 777);
    CHECK(dump.slices == slices);
    std::filesystem::remove(path);
}
