#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "critheat/coefficients.hpp"
#include "critheat/rng.hpp"

using namespace critheat;

TEST_CASE("sigma families evaluate per definition") {
    const SigmaFamily critical{SigmaKind::CriticalPower, 1.0, 1.5};
    CHECK(sigma_eval(critical, 0.0) == 1.0);
    CHECK(sigma_eval(critical, 4.0) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(sigma_eval(critical, -4.0) == doctest::Approx(9.0).epsilon(1e-14));

    const SigmaFamily linear{SigmaKind::Linear, 2.0, 0.0};
    CHECK(sigma_eval(linear, -3.0) == -6.0);

    const SigmaFamily power{SigmaKind::Power, 1.0, 2.0};
    CHECK(sigma_eval(power, 3.0) == doctest::Approx(10.0).epsilon(1e-14));
    // power at gamma = 3/2 coincides with the critical family
    const SigmaFamily power_three_halves{SigmaKind::Power, 2.5, 1.5};
    const SigmaFamily critical_scaled{SigmaKind::CriticalPower, 2.5, 0.0};
    for (double u : {-7.0, -0.3, 0.0, 1.0, 12.5}) {
        CHECK(sigma_eval(power_three_halves, u) == sigma_eval(critical_scaled, u));
    }
}

TEST_CASE("sigma clamp freezes outside [-n, n] and is the identity inside") {
    const SigmaFamily critical{SigmaKind::CriticalPower, 1.0, 1.5};
    CHECK(sigma_clamped(critical, 4.0, 5.0) == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(sigma_clamped(critical, 4.0, -10.0) == doctest::Approx(9.0).epsilon(1e-14));
    for (int i = 0; i <= 80; ++i) {
        const double u = -4.0 + 8.0 * i / 80.0;
        CHECK(sigma_clamped(critical, 4.0, u) == sigma_eval(critical, u));
    }
    // boundedness: the monotone families attain sup at the clamp endpoints
    double sup = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double u = -50.0 + 0.1 * i;
        sup = std::max(sup, std::abs(sigma_clamped(critical, 4.0, u)));
    }
    CHECK(sup == doctest::Approx(sigma_eval(critical, 4.0)).epsilon(1e-14));
}

TEST_CASE("clamped drift: branch values and the eps^-alpha bound") {
    const DriftSpec spec{4.0, 0.5};
    CHECK(drift_clamped(spec, 0.1) == doctest::Approx(16.0).epsilon(1e-14));
    CHECK(drift_clamped(spec, 2.0) == doctest::Approx(0.0625).epsilon(1e-14));
    GaussianStream draws(13);
    const double cap = drift_clamped(spec, spec.epsilon);
    for (int i = 0; i < 10000; ++i) {
        CHECK(drift_clamped(spec, 5.0 * draws.next()) <= cap);
    }
    // non-integer alpha goes through the generic pow path
    const DriftSpec frac{3.5, 0.5};
    CHECK(drift_clamped(frac, 2.0) == doctest::Approx(std::pow(2.0, -3.5)).epsilon(1e-14));
}

TEST_CASE("clamp levels are mutually consistent") {
    const SigmaFamily critical{SigmaKind::CriticalPower, 1.3, 1.5};
    for (int i = 0; i <= 60; ++i) {
        const double u = -2.0 + 4.0 * i / 60.0;
        CHECK(sigma_clamped(critical, 2.0, u) == sigma_clamped(critical, 6.0, u));
    }
    const DriftSpec coarse{4.0, 0.5};
    const DriftSpec fine{4.0, 0.25};
    for (int i = 0; i <= 60; ++i) {
        const double u = 0.5 + 0.2 * i;
        CHECK(drift_clamped(coarse, u) == drift_clamped(fine, u));
    }
}

TEST_CASE("growth gate") {
    std::vector<double> grid;
    for (int i = -1000; i <= 1000; ++i) grid.push_back(static_cast<double>(i));
    CHECK(growth_check({SigmaKind::CriticalPower, 1.0, 1.5}, 1.0, grid));
    CHECK_FALSE(growth_check({SigmaKind::Power, 1.0, 2.0}, 1.0, grid));
    CHECK(growth_check({SigmaKind::Linear, 1.0, 0.0}, 2.0, grid));
    CHECK_THROWS_AS(growth_check({SigmaKind::Linear, 1.0, 0.0}, 1.0, {}), std::invalid_argument);
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(validate_sigma({SigmaKind::Linear, -1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate_sigma({SigmaKind::Power, 1.0, -0.5}), std::invalid_argument);
    CHECK_NOTHROW(validate_sigma({SigmaKind::Linear, 0.0, 0.0})); // noise off
    CHECK_THROWS_AS(validate_drift({3.0, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate_drift({4.0, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate_drift({4.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(validate_drift({4.0, 0.5}));
}
