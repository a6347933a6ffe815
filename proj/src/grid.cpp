#include "critheat/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "critheat/fft.hpp"

namespace critheat {

void validate_grid(const Grid& grid) {
    if (grid.n < 8 || !fft::is_power_of_two(grid.n)) {
        throw std::invalid_argument("grid.n must be a power of two >= 8");
    }
    if (!(grid.dt > 0.0) || !std::isfinite(grid.dt)) {
        throw std::invalid_argument("grid.dt must be positive and finite");
    }
    if (grid.steps < 1) {
        throw std::invalid_argument("grid.steps must be >= 1");
    }
}

double l1_norm(const Field& field, double dx) {
    double acc = 0.0;
    for (double v : field) acc += std::abs(v);
    return acc * dx;
}

double sup_norm(const Field& field) {
    double acc = 0.0;
    for (double v : field) acc = std::max(acc, std::abs(v));
    return acc;
}

double min_value(const Field& field) {
    double acc = field.empty() ? 0.0 : field.front();
    for (double v : field) acc = std::min(acc, v);
    return acc;
}

bool all_finite(const Field& field) {
    for (double v : field) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

} // namespace critheat
