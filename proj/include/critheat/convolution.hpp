#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/grid.hpp"
#include "critheat/noise.hpp"

namespace critheat {

/// Stochastic convolution of the heat semigroup against weighted white noise,
/// realized incrementally: Z(0) = 0, Z(t+dt) = S(dt) Z(t) + phi(t)*dW/dx.
struct ConvolutionResult {
    Field final_field;
    double sup_abs = 0.0;                // sup over all grid times and x
    std::vector<double> sup_at_marks;    // running sup at each requested step mark
};

/// Constant integrand phi == phi_level.
ConvolutionResult stochastic_convolution(const Grid& grid, double phi_level, std::uint64_t seed,
                                         std::span<const std::size_t> marks = {});

/// Adapted integrand: fill_phi(step, z_before_step, out) writes phi(step, .).
/// phi at step s sees only the state built from slices 0..s-1.
using AdaptedIntegrand = std::function<void(std::size_t, const Field&, std::vector<double>&)>;
ConvolutionResult stochastic_convolution_adapted(const Grid& grid, const AdaptedIntegrand& fill_phi,
                                                 std::uint64_t seed,
                                                 std::span<const std::size_t> marks = {});

/// int_0^t |G_unit(s,.)|_{L2}^2 ds, the pointwise variance of the stochastic
/// convolution with unit integrand. Evaluated by time quadrature of the kernel
/// series with a substitution that removes the s^{-1/2} endpoint singularity.
double unit_convolution_variance(double t);

struct FactorizationComparison {
    double sup_z = 0.0;     // sup |Z| over grid times >= 1 and x
    double sup_diff = 0.0;  // sup |Z - reconstruction|
    double rel_diff() const { return sup_z > 0.0 ? sup_diff / sup_z : 0.0; }
};

/// Runs the direct recursion and the factorized reconstruction
///   Z_beta(t) = int int (t-s)^{-beta} G(t-s) phi dW,
///   Z(t) = sin(pi beta)/pi * int int (t-s)^{beta-1} G(t-s) Z_beta(s) dy ds
/// on the same noise and compares them. Singular time weights are integrated
/// exactly over each cell; kernel and Z_beta are taken at cell right
/// endpoints, which matches the direct recursion's lag convention. Throws
/// ConfigError when beta lies outside (3/(2p), 1/4).
FactorizationComparison factorization_compare(const Grid& grid, const ConvolutionCfg& spec,
                                              std::uint64_t seed);

FactorizationComparison factorization_compare_slices(const Grid& grid, const ConvolutionCfg& spec,
                                                     std::span<const NoiseSlice> slices);

struct FactorizationRefinement {
    FactorizationComparison coarse;
    FactorizationComparison fine;   // dt/2, matched noise (coarse = pair sums)
    double improvement = 0.0;       // coarse rel_diff / fine rel_diff
};

FactorizationRefinement factorization_refinement(const Grid& coarse_grid, const ConvolutionCfg& spec,
                                                 std::uint64_t seed);

/// Dimensionless weight the discrete reconstruction assigns to the noise
/// increment at lag L (exact value 1 in the continuum identity). Exposed for
/// the quadrature-consistency tests.
double factorization_lag_weight(double beta, std::size_t lag);

} // namespace critheat
