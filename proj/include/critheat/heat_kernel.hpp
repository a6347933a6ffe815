#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "critheat/fft.hpp"
#include "critheat/grid.hpp"

namespace critheat {

/// Normalization of the periodic heat-kernel cosine series on [-pi,pi].
///
/// Sqrt2PiMass: G(t,x) = (2pi)^{-1/2} + sum_k sqrt(2/pi) e^{-k^2 t} cos(kx),
///              total integral sqrt(2*pi).
/// UnitMass:    G(t,x) = (2pi)^{-1}   + sum_k (1/pi)     e^{-k^2 t} cos(kx),
///              total integral 1. This is the convolution kernel of the heat
///              semigroup; the solver and all probabilistic checks use it.
/// The two series differ by the constant factor sqrt(2*pi).
enum class KernelNorm { Sqrt2PiMass, UnitMass };

struct KernelSpec {
    KernelNorm norm = KernelNorm::UnitMass;
    double truncation_tol = 1e-12; // dimensionless tail bound, > 0
};

/// Series evaluation degrades below this time; smaller t is clamped to it.
inline constexpr double kMinSeriesTime = 1e-6;

/// Smallest K with exp(-K^2 t)/(2 K t) <= tol, which bounds the dropped tail
/// integral int_K^inf exp(-x^2 t) dx. The truncated-series error is then at
/// most coeff*tol where coeff is the cosine-coefficient of the normalization
/// (sqrt(2/pi) or 1/pi). Throws std::domain_error for t <= 0 or tol <= 0.
int truncation_order(double t, double tol);

/// Truncated cosine series at (t, x). Throws std::domain_error for t <= 0.
double eval_kernel(const KernelSpec& spec, double t, double x);

/// Composite trapezoid of |G(t,.)| over [-pi,pi] on quadrature_n points.
/// quadrature_n must be >= 64.
double kernel_l1_norm(const KernelSpec& spec, double t, std::size_t quadrature_n);

/// G(t,0), the supremum of the kernel over x.
double kernel_sup(const KernelSpec& spec, double t);

/// Per-bin heat multipliers exp(-k^2 t) for an n-point grid, DFT bin order
/// (bin j carries wavenumber min(j, n-j)).
std::vector<double> mode_decay(std::size_t n, double t);

/// FFT plan plus scratch for one grid size; reused across semigroup calls.
/// Pure scratch: safe to use one instance per thread of execution.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(std::size_t n);
    std::size_t size() const { return plan_.size(); }

    /// Exact heat semigroup on the grid: Fourier mode k scaled by exp(-k^2 t).
    /// t = 0 returns the input unchanged. Throws std::domain_error for t < 0.
    Field semigroup_apply(double t, const Field& field);

    /// In-place variant with caller-supplied multipliers from mode_decay();
    /// this is the solver's hot path.
    void semigroup_apply_inplace(Field& field, const std::vector<double>& decay);

private:
    fft::Radix2Plan plan_;
    std::vector<std::complex<double>> buf_;
};

/// O(n^2) projection onto real Fourier modes. Serial reference implementation
/// kept for testing the spectral path; also exercised by the benchmark target.
Field semigroup_apply_reference(double t, const Field& field);

struct SmoothingCheck {
    double lhs = 0.0;       // sup of the t-smoothed field
    double ratio = 0.0;     // lhs * sqrt(t) / |field|_{L1}
};

/// Measures sup S(t)f against the t^{-1/2} |f|_{L1} smoothing estimate.
/// Requires t in (0,1] and a nonnegative field; a zero field yields (0,0).
/// Callers assert ratio <= smoothing_ratio_bound().
SmoothingCheck smoothing_bound_check(double t, const Field& field, double dx,
                                     SpectralWorkspace& workspace);

/// Calibrated constant for the smoothing estimate: 1.1 times the maximum of
/// kernel_sup(UnitMass, t) * sqrt(t) over 50 log-spaced t in [1e-4, 1].
/// Computed once per process from the series itself.
double smoothing_ratio_bound();

} // namespace critheat
