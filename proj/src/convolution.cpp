#include "critheat/convolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "critheat/heat_kernel.hpp"

namespace critheat {

namespace {

ConvolutionResult run_convolution(const Grid& grid, const AdaptedIntegrand& fill_phi,
                                  std::uint64_t seed, std::span<const std::size_t> marks) {
    validate_grid(grid);
    const std::size_t n = grid.n;
    const double inv_dx = 1.0 / grid.dx();

    SpectralWorkspace workspace(n);
    const std::vector<double> decay = mode_decay(n, grid.dt);
    NoiseStream stream(grid, seed);

    ConvolutionResult result;
    result.final_field.assign(n, 0.0);
    result.sup_at_marks.assign(marks.size(), 0.0);

    Field z(n, 0.0);
    std::vector<double> phi(n, 0.0);
    NoiseSlice slice;
    double running_sup = 0.0;

    std::size_t next_mark = 0;
    const auto record_marks = [&](std::size_t m) {
        while (next_mark < marks.size() && marks[next_mark] == m) {
            result.sup_at_marks[next_mark] = running_sup;
            ++next_mark;
        }
    };
    record_marks(0);

    for (std::size_t m = 1; m <= grid.steps; ++m) {
        fill_phi(m - 1, z, phi);
        stream.next_slice(slice);
        workspace.semigroup_apply_inplace(z, decay);
        for (std::size_t j = 0; j < n; ++j) {
            z[j] += phi[j] * slice[j] * inv_dx;
            running_sup = std::max(running_sup, std::abs(z[j]));
        }
        record_marks(m);
    }
    result.final_field = z;
    result.sup_abs = running_sup;
    return result;
}

void validate_convolution(const ConvolutionCfg& spec) {
    if (!(spec.p > 6.0)) throw ConfigError("convolution.p must be > 6");
    if (!(spec.beta > 3.0 / (2.0 * spec.p)) || !(spec.beta < 0.25)) {
        throw ConfigError("convolution.beta must lie in (3/(2p), 1/4)");
    }
}

} // namespace

ConvolutionResult stochastic_convolution(const Grid& grid, double phi_level, std::uint64_t seed,
                                         std::span<const std::size_t> marks) {
    return run_convolution(
        grid,
        [phi_level](std::size_t, const Field&, std::vector<double>& out) {
            std::fill(out.begin(), out.end(), phi_level);
        },
        seed, marks);
}

ConvolutionResult stochastic_convolution_adapted(const Grid& grid, const AdaptedIntegrand& fill_phi,
                                                 std::uint64_t seed,
                                                 std::span<const std::size_t> marks) {
    return run_convolution(grid, fill_phi, seed, marks);
}

double unit_convolution_variance(double t) {
    if (!(t > 0.0)) throw std::domain_error("unit_convolution_variance: t must be > 0");
    // int_0^t |G(s)|_{L2}^2 ds with |G(s)|_{L2}^2 = G(2s, 0); substituting
    // s = w^2 gives the smooth integrand 2 w G(2w^2, 0) on [0, sqrt(t)].
    const KernelSpec unit{KernelNorm::UnitMass, 1e-14};
    const double w_end = std::sqrt(t);
    const double w_flat = std::sqrt(0.5 * kMinSeriesTime); // below: integrand == (2 pi)^{-1/2}
    const auto integrand = [&](double w) {
        if (w < w_flat) return 1.0 / std::sqrt(kTwoPi);
        return 2.0 * w * eval_kernel(unit, 2.0 * w * w, 0.0);
    };
    constexpr std::size_t kIntervals = 4096; // even, for Simpson
    const double h = w_end / static_cast<double>(kIntervals);
    double acc = integrand(0.0) + integrand(w_end);
    for (std::size_t i = 1; i < kIntervals; ++i) {
        acc += integrand(h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * h / 3.0;
}

double factorization_lag_weight(double beta, std::size_t lag) {
    // sin(pi beta)/pi * sum over a+b=lag, a>=1, b>=0 of
    //   ((b+1)^beta - b^beta)/beta * (a^{1-beta} - (a-1)^{1-beta})/(1-beta);
    // the dt powers cancel, and the continuum value is exactly 1.
    if (lag == 0) return 0.0;
    const double factor = std::sin(kPi * beta) / kPi;
    double acc = 0.0;
    for (std::size_t a = 1; a <= lag; ++a) {
        const std::size_t b = lag - a;
        const double win = (std::pow(static_cast<double>(a), 1.0 - beta) -
                            std::pow(static_cast<double>(a - 1), 1.0 - beta)) / (1.0 - beta);
        const double wout = (std::pow(static_cast<double>(b + 1), beta) -
                             std::pow(static_cast<double>(b), beta)) / beta;
        acc += win * wout;
    }
    return factor * acc;
}

FactorizationComparison factorization_compare_slices(const Grid& grid, const ConvolutionCfg& spec,
                                                     std::span<const NoiseSlice> slices) {
    validate_grid(grid);
    validate_convolution(spec);
    if (slices.size() != grid.steps) {
        throw std::invalid_argument("factorization_compare_slices: slice count mismatch");
    }
    const std::size_t n = grid.n;
    const std::size_t steps = grid.steps;
    const double dt = grid.dt;
    const double beta = spec.beta;
    const double inv_dx = 1.0 / grid.dx();
    const double factor = std::sin(kPi * beta) / kPi;

    using Complex = std::complex<double>;
    fft::Radix2Plan plan(n);

    // Spectral propagators per lag, computed directly (no accumulated powers).
    std::vector<std::vector<double>> decay_lag(steps + 1);
    for (std::size_t l = 0; l <= steps; ++l) {
        decay_lag[l] = mode_decay(n, dt * static_cast<double>(l));
    }
    // Singular weights, integrated exactly over each time cell.
    std::vector<double> win(steps + 1, 0.0);  // cell average of (t_j - s)^{-beta}
    std::vector<double> wout(steps + 1, 0.0); // cell integral of (t_m - s)^{beta-1}
    const double dt_mbeta = std::pow(dt, -beta);
    const double dt_pbeta = std::pow(dt, beta);
    for (std::size_t a = 1; a <= steps; ++a) {
        win[a] = dt_mbeta *
                 (std::pow(static_cast<double>(a), 1.0 - beta) -
                  std::pow(static_cast<double>(a - 1), 1.0 - beta)) / (1.0 - beta);
    }
    for (std::size_t b = 0; b < steps; ++b) {
        wout[b] = dt_pbeta *
                  (std::pow(static_cast<double>(b + 1), beta) -
                   std::pow(static_cast<double>(b), beta)) / beta;
    }

    // Spectra of the injected increments phi * dW / dx.
    std::vector<std::vector<Complex>> eta_hat(steps, std::vector<Complex>(n));
    for (std::size_t i = 0; i < steps; ++i) {
        if (slices[i].size() != n) {
            throw std::invalid_argument("factorization_compare_slices: slice width mismatch");
        }
        for (std::size_t j = 0; j < n; ++j) {
            eta_hat[i][j] = {spec.phi_level * slices[i][j] * inv_dx, 0.0};
        }
        plan.forward(eta_hat[i].data());
    }

    // Z_beta(t_j) for j = 1..steps (spectral).
    std::vector<std::vector<Complex>> zbeta_hat(steps + 1, std::vector<Complex>(n, {0.0, 0.0}));
    for (std::size_t j = 1; j <= steps; ++j) {
        auto& acc = zbeta_hat[j];
        for (std::size_t i = 0; i < j; ++i) {
            const double w = win[j - i];
            const auto& lagged = decay_lag[j - 1 - i];
            const auto& eta = eta_hat[i];
            for (std::size_t k = 0; k < n; ++k) acc[k] += w * lagged[k] * eta[k];
        }
    }

    FactorizationComparison result;
    std::vector<Complex> z_hat(n, {0.0, 0.0});
    std::vector<Complex> scratch_z(n);
    std::vector<Complex> scratch_r(n);
    for (std::size_t m = 1; m <= steps; ++m) {
        // Direct recursion Z <- S(dt) Z + eta.
        for (std::size_t k = 0; k < n; ++k) {
            z_hat[k] = decay_lag[1][k] * z_hat[k] + eta_hat[m - 1][k];
        }
        // Reconstruction from Z_beta.
        std::fill(scratch_r.begin(), scratch_r.end(), Complex{0.0, 0.0});
        for (std::size_t b = 0; b < m; ++b) {
            const double w = factor * wout[b];
            const auto& lagged = decay_lag[b];
            const auto& zb = zbeta_hat[m - b];
            for (std::size_t k = 0; k < n; ++k) scratch_r[k] += w * lagged[k] * zb[k];
        }
        scratch_z = z_hat;
        plan.inverse(scratch_z.data());
        plan.inverse(scratch_r.data());
        for (std::size_t k = 0; k < n; ++k) {
            result.sup_z = std::max(result.sup_z, std::abs(scratch_z[k].real()));
            result.sup_diff = std::max(result.sup_diff,
                                       std::abs(scratch_z[k].real() - scratch_r[k].real()));
        }
    }
    return result;
}

FactorizationComparison factorization_compare(const Grid& grid, const ConvolutionCfg& spec,
                                              std::uint64_t seed) {
    NoiseStream stream(grid, seed);
    std::vector<NoiseSlice> slices(grid.steps);
    for (auto& slice : slices) stream.next_slice(slice);
    return factorization_compare_slices(grid, spec, slices);
}

FactorizationRefinement factorization_refinement(const Grid& coarse_grid, const ConvolutionCfg& spec,
                                                 std::uint64_t seed) {
    Grid fine_grid = coarse_grid;
    fine_grid.dt = coarse_grid.dt / 2.0;
    fine_grid.steps = coarse_grid.steps * 2;

    NoiseStream stream(fine_grid, seed);
    std::vector<NoiseSlice> fine(fine_grid.steps);
    for (auto& slice : fine) stream.next_slice(slice);

    std::vector<NoiseSlice> coarse(coarse_grid.steps, NoiseSlice(coarse_grid.n, 0.0));
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        for (std::size_t j = 0; j < coarse_grid.n; ++j) {
            coarse[i][j] = fine[2 * i][j] + fine[2 * i + 1][j];
        }
    }

    FactorizationRefinement result;
    result.coarse = factorization_compare_slices(coarse_grid, spec, coarse);
    result.fine = factorization_compare_slices(fine_grid, spec, fine);
    result.improvement = result.fine.rel_diff() > 0.0
                             ? result.coarse.rel_diff() / result.fine.rel_diff()
                             : 0.0;
    return result;
}

} // namespace critheat
