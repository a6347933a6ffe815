#include "critheat/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace critheat::fft {

bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

Radix2Plan::Radix2Plan(std::size_t n) : n_(n) {
    if (n < 2 || !is_power_of_two(n)) {
        throw std::invalid_argument("fft: size must be a power of two >= 2");
    }
    reversed_.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b) {
            r |= ((i >> b) & 1u) << (log2n - 1 - b);
        }
        reversed_[i] = r;
    }
    twiddle_.resize(n / 2);
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        twiddle_[j] = {std::cos(angle), std::sin(angle)};
    }
}

void Radix2Plan::butterflies(std::complex<double>* data, bool conjugate) const {
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t r = reversed_[i];
        if (i < r) std::swap(data[i], data[r]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t stride = n_ / len;
        const std::size_t half = len / 2;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                std::complex<double> w = twiddle_[j * stride];
                if (conjugate) w = std::conj(w);
                const std::complex<double> odd = data[start + j + half] * w;
                const std::complex<double> even = data[start + j];
                data[start + j] = even + odd;
                data[start + j + half] = even - odd;
            }
        }
    }
}

void Radix2Plan::forward(std::complex<double>* data) const {
    butterflies(data, false);
}

void Radix2Plan::inverse(std::complex<double>* data) const {
    butterflies(data, true);
    const double inv = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) data[i] *= inv;
}

void dft_reference(std::span<const std::complex<double>> in,
                   std::span<std::complex<double>> out) {
    if (in.size() != out.size()) {
        throw std::invalid_argument("dft_reference: size mismatch");
    }
    const std::size_t n = in.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(j * k % n) / static_cast<double>(n);
            acc += in[j] * std::complex<double>{std::cos(angle), std::sin(angle)};
        }
        out[k] = acc;
    }
}

} // namespace critheat::fft
