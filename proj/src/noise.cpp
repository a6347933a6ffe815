#include "critheat/noise.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "critheat/binio.hpp"

namespace critheat {

using binio::get_f64;
using binio::get_u64;
using binio::put_f64;
using binio::put_u64;

NoiseStream::NoiseStream(const Grid& grid, std::uint64_t seed)
    : grid_(grid), seed_(seed), gaussians_(seed), scale_(std::sqrt(grid.dt * grid.dx())) {
    validate_grid(grid);
}

void NoiseStream::next_slice(NoiseSlice& out) {
    out.resize(grid_.n);
    for (std::size_t j = 0; j < grid_.n; ++j) {
        out[j] = scale_ * gaussians_.next();
    }
}

NoiseSlice NoiseStream::next_slice() {
    NoiseSlice out;
    next_slice(out);
    return out;
}

double walsh_integral(std::span<const NoiseSlice> slices,
                      const std::function<double(std::size_t, std::size_t)>& phi) {
    double acc = 0.0;
    const std::size_t n = slices.empty() ? 0 : slices.front().size();
    for (std::size_t s = 0; s < slices.size(); ++s) {
        if (slices[s].size() != n) {
            throw std::invalid_argument("walsh_integral: inconsistent slice widths");
        }
        for (std::size_t j = 0; j < n; ++j) {
            acc += phi(s, j) * slices[s][j];
        }
    }
    return acc;
}

CovarianceReport covariance_test(const Grid& grid,
                                 const std::function<double(std::size_t, std::size_t)>& phi,
                                 const std::function<double(std::size_t, std::size_t)>& psi,
                                 std::size_t replicas, std::uint64_t master_seed) {
    if (replicas < 100) {
        throw std::invalid_argument("covariance_test: replicas must be >= 100");
    }
    validate_grid(grid);

    CovarianceReport report;
    report.replicas = replicas;

    const double cell = grid.dt * grid.dx();
    for (std::size_t s = 0; s < grid.steps; ++s) {
        for (std::size_t j = 0; j < grid.n; ++j) {
            report.target += phi(s, j) * psi(s, j) * cell;
        }
    }

    std::vector<double> xs(replicas);
    std::vector<double> ys(replicas);
    NoiseSlice slice;
    for (std::size_t r = 0; r < replicas; ++r) {
        NoiseStream stream(grid, substream_seed(master_seed, r));
        double x = 0.0;
        double y = 0.0;
        for (std::size_t s = 0; s < grid.steps; ++s) {
            stream.next_slice(slice);
            for (std::size_t j = 0; j < grid.n; ++j) {
                x += phi(s, j) * slice[j];
                y += psi(s, j) * slice[j];
            }
        }
        xs[r] = x;
        ys[r] = y;
    }

    double mean_x = 0.0;
    double mean_y = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        mean_x += xs[r];
        mean_y += ys[r];
    }
    mean_x /= static_cast<double>(replicas);
    mean_y /= static_cast<double>(replicas);

    // Covariance and the standard error of the product terms.
    double sum_prod = 0.0;
    double sum_prod_sq = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        const double p = (xs[r] - mean_x) * (ys[r] - mean_y);
        sum_prod += p;
        sum_prod_sq += p * p;
    }
    const double nr = static_cast<double>(replicas);
    report.empirical_cov = sum_prod / (nr - 1.0);
    const double var_prod = (sum_prod_sq - sum_prod * sum_prod / nr) / (nr - 1.0);
    report.std_err = std::sqrt(std::max(var_prod, 0.0) / nr);
    report.pass = std::abs(report.empirical_cov - report.target) <= 3.0 * report.std_err;
    return report;
}

void write_noise_dump(const std::filesystem::path& path, const Grid& grid,
                      std::uint64_t seed, std::span<const NoiseSlice> slices) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_noise_dump: cannot open " + path.string());
    put_u64(os, grid.n);
    put_f64(os, grid.dt);
    put_u64(os, slices.size());
    put_u64(os, seed);
    for (const NoiseSlice& slice : slices) {
        if (slice.size() != grid.n) {
            throw std::invalid_argument("write_noise_dump: slice width mismatch");
        }
        for (double v : slice) put_f64(os, v);
    }
    if (!os) throw std::runtime_error("write_noise_dump: write failed for " + path.string());
}

NoiseDump read_noise_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_noise_dump: cannot open " + path.string());
    NoiseDump dump;
    dump.grid.n = get_u64(is);
    dump.grid.dt = get_f64(is);
    dump.grid.steps = get_u64(is);
    dump.seed = get_u64(is);
    if (!is) throw std::runtime_error("read_noise_dump: truncated header in " + path.string());
    dump.slices.assign(dump.grid.steps, NoiseSlice(dump.grid.n, 0.0));
    for (NoiseSlice& slice : dump.slices) {
        for (double& v : slice) v = get_f64(is);
    }
    if (!is) throw std::runtime_error("read_noise_dump: truncated payload in " + path.string());
    return dump;
}

} // namespace critheat
