#include "critheat/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace critheat {

void validate_sigma(const SigmaFamily& family) {
    // c = 0 switches the noise off entirely; useful for deterministic checks.
    if (!(family.c >= 0.0) || !std::isfinite(family.c)) {
        throw std::invalid_argument("sigma.c must be nonnegative and finite");
    }
    if (family.kind == SigmaKind::Power && (!(family.gamma > 0.0) || !std::isfinite(family.gamma))) {
        throw std::invalid_argument("sigma.gamma must be positive and finite");
    }
}

void validate_drift(const DriftSpec& spec) {
    if (!(spec.alpha > 3.0)) {
        throw std::invalid_argument("drift.alpha must be > 3");
    }
    if (!(spec.epsilon > 0.0) || !(spec.epsilon < 1.0)) {
        throw std::invalid_argument("clamp.epsilon must lie in (0,1)");
    }
}

double sigma_eval(const SigmaFamily& family, double u) {
    const double a = std::abs(u);
    switch (family.kind) {
    case SigmaKind::CriticalPower:
        return family.c * (1.0 + a * std::sqrt(a));
    case SigmaKind::Power:
        // |u|^gamma, with the grid-sweep exponents on fast paths
        if (family.gamma == 1.5) return family.c * (1.0 + a * std::sqrt(a));
        if (family.gamma == 1.0) return family.c * (1.0 + a);
        if (family.gamma == 2.0) return family.c * (1.0 + a * a);
        return family.c * (1.0 + std::pow(a, family.gamma));
    case SigmaKind::Linear:
        return family.c * u;
    }
    return 0.0;
}

double sigma_clamped(const SigmaFamily& family, double n, double u) {
    if (u < -n) return sigma_eval(family, -n);
    if (u > n) return sigma_eval(family, n);
    return sigma_eval(family, u);
}

double drift_clamped(const DriftSpec& spec, double u) {
    const double base = std::max(spec.epsilon, u);
    if (spec.alpha == 4.0) {
        const double sq = base * base;
        return 1.0 / (sq * sq);
    }
    return std::pow(base, -spec.alpha);
}

bool growth_check(const SigmaFamily& family, double big_c, std::span<const double> grid) {
    if (grid.empty()) {
        throw std::invalid_argument("growth_check: empty grid");
    }
    for (double u : grid) {
        // same |u|^{3/2} expression as the critical family, so the equality
        // case |sigma| = C(1 + |u|^{3/2}) passes exactly
        const double a = std::abs(u);
        const double bound = big_c * (1.0 + a * std::sqrt(a));
        if (std::abs(sigma_eval(family, u)) > bound) return false;
    }
    return true;
}

} // namespace critheat
