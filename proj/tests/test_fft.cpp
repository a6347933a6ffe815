#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "critheat/fft.hpp"
#include "critheat/rng.hpp"

using namespace critheat;

namespace {

std::vector<std::complex<double>> random_signal(std::size_t n, std::uint64_t seed) {
    GaussianStream draws(seed);
    std::vector<std::complex<double>> out(n);
    for (auto& v : out) v = {draws.next(), draws.next()};
    return out;
}

double max_abs_diff(const std::vector<std::complex<double>>& a,
                    const std::vector<std::complex<double>>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

} // namespace

TEST_CASE("forward transform matches the O(n^2) reference") {
    for (std::size_t n : {8u, 32u, 64u, 256u}) {
        fft::Radix2Plan plan(n);
        auto signal = random_signal(n, 17 + n);
        std::vector<std::complex<double>> reference(n);
        fft::dft_reference(signal, reference);
        auto fast = signal;
        plan.forward(fast.data());
        CHECK(max_abs_diff(fast, reference) < 1e-10 * static_cast<double>(n));
    }
}

TEST_CASE("inverse undoes forward") {
    fft::Radix2Plan plan(128);
    auto signal = random_signal(128, 3);
    auto data = signal;
    plan.forward(data.data());
    plan.inverse(data.data());
    CHECK(max_abs_diff(data, signal) < 1e-13);
}

TEST_CASE("transform is exactly homogeneous under power-of-two scaling") {
    fft::Radix2Plan plan(64);
    auto signal = random_signal(64, 5);
    auto doubled = signal;
    for (auto& v : doubled) v *= 2.0;
    plan.forward(signal.data());
    plan.forward(doubled.data());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        CHECK(doubled[i] == 2.0 * signal[i]);
    }
}

TEST_CASE("single mode lands in a single bin") {
    const std::size_t n = 64;
    fft::Radix2Plan plan(n);
    std::vector<std::complex<double>> data(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = 2.0 * std::numbers::pi * 5.0 * static_cast<double>(j) / static_cast<double>(n);
        data[j] = {std::cos(angle), std::sin(angle)};
    }
    plan.forward(data.data());
    CHECK(std::abs(data[5] - std::complex<double>{static_cast<double>(n), 0.0}) < 1e-9);
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 5) CHECK(std::abs(data[k]) < 1e-9);
    }
}

TEST_CASE("invalid sizes are rejected") {
    CHECK_THROWS_AS(fft::Radix2Plan(0), std::invalid_argument);
    CHECK_THROWS_AS(fft::Radix2Plan(1), std::invalid_argument);
    CHECK_THROWS_AS(fft::Radix2Plan(48), std::invalid_argument);
}
