#pragma once

#include <cmath>
#include <cstdint>

namespace entwit {

// SplitMix64 (Vigna's public-domain mixer applied to a Weyl counter).
// Chosen as the project's deterministic generator because the whole
// algorithm fits in a dozen lines and can be re-typed in any language;
// the frozen seed->output triples live in docs/rng_vectors.md.  Identical
// seeds reproduce identical streams bit for bit on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1) with 53 random bits
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; consumes exactly two uniforms
    double next_gaussian() noexcept {
        const double u1 = 1.0 - next_double(); // (0, 1], log-safe
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace entwit
