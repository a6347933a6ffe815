#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace critheat::fft {

/// In-place radix-2 Cooley-Tukey FFT for power-of-two sizes.
///
/// A plan precomputes bit-reversal indices and twiddle factors for one size,
/// so transforms are allocation-free and bit-reproducible: the same input on
/// the same build always yields the same output, independent of thread count.
class Radix2Plan {
public:
    /// n must be a power of two, n >= 2.
    explicit Radix2Plan(std::size_t n);

    std::size_t size() const { return n_; }

    /// Unscaled forward transform: X[k] = sum_j x[j] e^{-2*pi*i*j*k/n}.
    void forward(std::complex<double>* data) const;

    /// Inverse transform, scaled by 1/n (forward followed by inverse is identity).
    void inverse(std::complex<double>* data) const;

private:
    void butterflies(std::complex<double>* data, bool conjugate) const;

    std::size_t n_;
    std::vector<std::size_t> reversed_;
    std::vector<std::complex<double>> twiddle_; // e^{-2*pi*i*j/n}, j < n/2
};

/// O(n^2) discrete Fourier transform. Reference implementation kept for
/// testing the fast path; also used by the benchmark target.
void dft_reference(std::span<const std::complex<double>> in,
                   std::span<std::complex<double>> out);

bool is_power_of_two(std::size_t n);

} // namespace critheat::fft
