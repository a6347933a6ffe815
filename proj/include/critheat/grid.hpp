#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace critheat {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Spatial samples on the uniform periodic mesh x_j = -pi + j*dx, dx = 2*pi/N.
/// Index arithmetic wraps modulo N.
using Field = std::vector<double>;

/// Uniform discretization of [0,T] x [-pi,pi): N spatial cells (power of two),
/// `steps` time steps of size dt, horizon T = steps*dt.
struct Grid {
    std::size_t n = 64;
    double dt = 1e-3;
    std::size_t steps = 1;

    double dx() const { return kTwoPi / static_cast<double>(n); }
    double horizon() const { return dt * static_cast<double>(steps); }
    double x(std::size_t j) const { return -kPi + static_cast<double>(j) * dx(); }
    double time(std::size_t m) const { return dt * static_cast<double>(m); }
};

/// Throws std::invalid_argument unless n >= 8 is a power of two, dt > 0, steps >= 1.
void validate_grid(const Grid& grid);

/// Periodic composite trapezoid rule of |f|; with both endpoints identified
/// this is dx * sum_j |f_j|.
double l1_norm(const Field& field, double dx);

/// sup_j |f_j|
double sup_norm(const Field& field);

/// min_j f_j (signed minimum, used by the infimum stopping time)
double min_value(const Field& field);

bool all_finite(const Field& field);

} // namespace critheat
