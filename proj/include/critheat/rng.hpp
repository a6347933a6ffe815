#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace critheat {

/// splitmix64 finalizer (Vigna). Stateless: element `index` of the stream
/// seeded by `seed`. Used both as a seed mixer and to derive independent
/// per-replica substreams from (master_seed, replica).
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Substream seed for replica r of a master seed. Distinct replicas get
/// statistically independent generator states; the derivation is pure, so
/// replicas can be initialized in any order (or concurrently) and still
/// reproduce byte-identical streams.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t replica) {
    return splitmix64_at(master_seed, replica);
}

/// xoshiro256++ (Blackman & Vigna, public domain reference implementation).
/// Fully specified arithmetic, so streams are reproducible across builds.
class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        for (int i = 0; i < 4; ++i) s_[i] = splitmix64_at(seed, static_cast<std::uint64_t>(i));
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in (0, 1]; never 0, so log() below is safe.
    double next_unit() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

/// Standard-normal stream via the trigonometric Box-Muller transform.
/// Consumes exactly two uniforms per pair, with no rejection branch, so the
/// draw count per sample is fixed and replay is deterministic.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.next_unit();
        const double u2 = rng_.next_unit();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace critheat
