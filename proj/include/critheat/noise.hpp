#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "critheat/grid.hpp"
#include "critheat/rng.hpp"

namespace critheat {

/// One time-step of discretized space-time white noise: N independent
/// centered Gaussians, one per spatial cell, variance dt*dx each.
using NoiseSlice = std::vector<double>;

/// Deterministic per-trajectory noise source. A single stream is strictly
/// sequential; distinct replicas use substream_seed(master, r).
class NoiseStream {
public:
    NoiseStream(const Grid& grid, std::uint64_t seed);

    /// Fills out (resized to N) with the next slice and advances the stream.
    void next_slice(NoiseSlice& out);

    NoiseSlice next_slice();

    const Grid& grid() const { return grid_; }
    std::uint64_t seed() const { return seed_; }

private:
    Grid grid_;
    std::uint64_t seed_;
    GaussianStream gaussians_;
    double scale_; // sqrt(dt*dx)
};

/// Discrete Walsh integral: sum_s sum_j phi(s,j) * increments(s,j).
/// phi at step s may depend only on slices 0..s-1 (caller's adaptedness
/// contract). Throws std::invalid_argument on inconsistent slice widths.
double walsh_integral(std::span<const NoiseSlice> slices,
                      const std::function<double(std::size_t, std::size_t)>& phi);

struct CovarianceReport {
    double empirical_cov = 0.0;
    double target = 0.0;        // dt*dx * sum phi*psi
    double std_err = 0.0;
    std::size_t replicas = 0;
    bool pass = false;          // |empirical - target| <= 3*std_err
};

/// Monte Carlo check of the white-noise covariance identity
/// E[W(phi) W(psi)] = int int phi psi against the deterministic quadrature
/// target. Requires replicas >= 100.
CovarianceReport covariance_test(const Grid& grid,
                                 const std::function<double(std::size_t, std::size_t)>& phi,
                                 const std::function<double(std::size_t, std::size_t)>& psi,
                                 std::size_t replicas, std::uint64_t master_seed);

/// Binary dump of a noise stream for replay: little-endian header
/// (u64 N, f64 dt, u64 steps, u64 seed) followed by steps*N f64 increments.
void write_noise_dump(const std::filesystem::path& path, const Grid& grid,
                      std::uint64_t seed, std::span<const NoiseSlice> slices);

struct NoiseDump {
    Grid grid;
    std::uint64_t seed = 0;
    std::vector<NoiseSlice> slices;
};

NoiseDump read_noise_dump(const std::filesystem::path& path);

} // namespace critheat
