#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "entwit/fock.hpp"
#include "entwit/rng.hpp"

namespace entwit {

// Parameterized families used throughout the toolkit.  The names below are
// the exact strings accepted by the CLI and config files.
enum class Family {
    two_photon_theta,   // cos(theta)|2,0> + i sin(theta)|0,2>
    single_photon_theta, // cos(theta)|1,0> + sin(theta)|0,1>
    noon,               // (|n,0> + |0,n>)/sqrt(2)
    tmsv,               // two-mode squeezed vacuum, parameter r
    fock_product,       // |n,m>
    coherent_product,   // |alpha> x |beta>, real amplitudes
    mixed_product,      // seeded random mixture of pure products (separable)
};

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::two_photon_theta: return "two-photon-theta";
        case Family::single_photon_theta: return "single-photon-theta";
        case Family::noon: return "noon";
        case Family::tmsv: return "tmsv";
        case Family::fock_product: return "fock-product";
        case Family::coherent_product: return "coherent-product";
        default: return "mixed-product";
    }
}

inline Family family_from_string(std::string_view name) {
    if (name == "two-photon-theta") return Family::two_photon_theta;
    if (name == "single-photon-theta") return Family::single_photon_theta;
    if (name == "noon") return Family::noon;
    if (name == "tmsv") return Family::tmsv;
    if (name == "fock-product") return Family::fock_product;
    if (name == "coherent-product") return Family::coherent_product;
    if (name == "mixed-product") return Family::mixed_product;
    throw ParameterOutOfRange("unknown state family '" + std::string(name) + "'");
}

struct StateSpec {
    Family family = Family::two_photon_theta;
    double theta = 0.0;        // theta families
    double r = 0.3;            // tmsv
    int n = 2;                 // noon size / fock occupation of mode a
    int m = 0;                 // fock occupation of mode b
    double alpha = 1.0;        // coherent amplitude, mode a
    double beta = 1.0;         // coherent amplitude, mode b
    std::uint64_t seed = 0;    // mixed-product
    int components = 3;        // mixed-product mixture size (2..5)
};

namespace detail {

// per-mode truncated coherent amplitudes alpha^n/sqrt(n!), plus the Poisson
// mass the truncation discards
inline std::pair<Vector, double> coherent_mode(double alpha, int cutoff) {
    Vector v(cutoff);
    double kept = 0.0;
    Complex c(1.0, 0.0);
    for (int n = 0; n < cutoff; ++n) {
        if (n > 0) c *= alpha / std::sqrt(static_cast<double>(n));
        v(n) = c;
        kept += std::norm(c);
    }
    kept *= std::exp(-alpha * alpha);
    return {std::move(v), 1.0 - kept};
}

// random pure state on the low-excitation block n_a, n_b <= max_level
inline Vector random_block_vector(const FockSpace& space, SplitMix64& gen, int max_level) {
    Vector v = Vector::Zero(space.dim());
    for (int na = 0; na <= max_level; ++na)
        for (int nb = 0; nb <= max_level; ++nb) {
            const double re = gen.next_gaussian();
            const double im = gen.next_gaussian();
            v(space.index(na, nb)) = Complex(re, im);
        }
    return v;
}

// random pure product state, each mode supported on levels <= max_level
inline Vector random_product_vector(const FockSpace& space, SplitMix64& gen, int max_level) {
    Vector va = Vector::Zero(space.cutoff_a);
    Vector vb = Vector::Zero(space.cutoff_b);
    for (int n = 0; n <= max_level; ++n) va(n) = Complex(gen.next_gaussian(), gen.next_gaussian());
    for (int n = 0; n <= max_level; ++n) vb(n) = Complex(gen.next_gaussian(), gen.next_gaussian());
    va.normalize();
    vb.normalize();
    Vector v(space.dim());
    for (int na = 0; na < space.cutoff_a; ++na)
        for (int nb = 0; nb < space.cutoff_b; ++nb) v(space.index(na, nb)) = va(na) * vb(nb);
    return v;
}

inline QuantumState random_separable_state(const FockSpace& space, SplitMix64& gen, int max_level,
                                           int components) {
    std::vector<double> weights(static_cast<std::size_t>(components));
    double total = 0.0;
    for (auto& w : weights) {
        w = gen.next_double() + 1e-6;
        total += w;
    }
    Matrix rho = Matrix::Zero(space.dim(), space.dim());
    for (const double w : weights) {
        Vector v = random_product_vector(space, gen, max_level);
        rho += (w / total) * (v * v.adjoint());
    }
    return density_state(space, std::move(rho));
}

} // namespace detail

inline QuantumState realize(const StateSpec& spec, const FockSpace& space) {
    const double two_pi = 2.0 * std::numbers::pi;
    const int min_cut = std::min(space.cutoff_a, space.cutoff_b);
    switch (spec.family) {
        case Family::two_photon_theta: {
            if (spec.theta < 0.0 || spec.theta >= two_pi)
                throw ParameterOutOfRange("theta must lie in [0, 2pi)");
            return pure_state(space, {{2, 0, Complex(std::cos(spec.theta), 0.0)},
                                      {0, 2, Complex(0.0, std::sin(spec.theta))}});
        }
        case Family::single_photon_theta: {
            if (spec.theta < 0.0 || spec.theta >= two_pi)
                throw ParameterOutOfRange("theta must lie in [0, 2pi)");
            return pure_state(space, {{1, 0, Complex(std::cos(spec.theta), 0.0)},
                                      {0, 1, Complex(std::sin(spec.theta), 0.0)}});
        }
        case Family::noon: {
            if (spec.n < 1 || spec.n > min_cut - 3)
                throw ParameterOutOfRange("noon size n must satisfy 1 <= n <= min(cutoff)-3");
            return pure_state(space,
                              {{spec.n, 0, Complex(1.0, 0.0)}, {0, spec.n, Complex(1.0, 0.0)}});
        }
        case Family::tmsv: {
            if (spec.r < 0.0 || spec.r > 0.8)
                throw ParameterOutOfRange("squeezing r must lie in [0, 0.8]");
            const double t = std::tanh(spec.r);
            const double discarded = std::pow(t, 2.0 * min_cut);
            if (discarded > guard_mass_tol)
                throw InsufficientCutoff("tmsv truncation discards mass " +
                                         std::to_string(discarded));
            Vector v = Vector::Zero(space.dim());
            double amp = 1.0;
            for (int n = 0; n < min_cut; ++n) {
                v(space.index(n, n)) = amp;
                amp *= t;
            }
            return pure_state_from_vector(space, std::move(v));
        }
        case Family::fock_product: {
            if (spec.n < 0 || spec.n > space.cutoff_a - 3 || spec.m < 0 ||
                spec.m > space.cutoff_b - 3)
                throw ParameterOutOfRange("fock occupations must satisfy 0 <= n <= cutoff-3");
            return pure_state(space, {{spec.n, spec.m, Complex(1.0, 0.0)}});
        }
        case Family::coherent_product: {
            if (std::abs(spec.alpha) > 2.0 || std::abs(spec.beta) > 2.0)
                throw ParameterOutOfRange("coherent amplitudes must satisfy |alpha|,|beta| <= 2");
            if (min_cut < 16)
                throw InsufficientCutoff("coherent-product requires cutoffs >= 16");
            auto [va, lost_a] = detail::coherent_mode(spec.alpha, space.cutoff_a);
            auto [vb, lost_b] = detail::coherent_mode(spec.beta, space.cutoff_b);
            const double discarded = 1.0 - (1.0 - lost_a) * (1.0 - lost_b);
            if (discarded > guard_mass_tol)
                throw InsufficientCutoff("coherent truncation discards mass " +
                                         std::to_string(discarded));
            Vector v(space.dim());
            for (int na = 0; na < space.cutoff_a; ++na)
                for (int nb = 0; nb < space.cutoff_b; ++nb)
                    v(space.index(na, nb)) = va(na) * vb(nb);
            return pure_state_from_vector(space, std::move(v));
        }
        case Family::mixed_product: {
            if (spec.components < 2 || spec.components > 5)
                throw ParameterOutOfRange("mixed-product needs 2..5 components");
            SplitMix64 gen(spec.seed);
            return detail::random_separable_state(space, gen, std::min(3, min_cut - 1),
                                                  spec.components);
        }
    }
    throw ParameterOutOfRange("unhandled state family");
}

// Deterministic corpus of random separable mixtures (2-5 pure product
// components each).  Every state is separable by construction, so it must
// never trigger any witness: this list is the soundness test bed.
inline std::vector<QuantumState> catalog_separable_suite(int count, std::uint64_t seed,
                                                         const FockSpace& space,
                                                         int max_level = 3) {
    if (count < 1) throw ParameterOutOfRange("count must be >= 1");
    if (max_level >= std::min(space.cutoff_a, space.cutoff_b))
        throw ParameterOutOfRange("max_level exceeds cutoffs");
    SplitMix64 gen(seed);
    std::vector<QuantumState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int components = 2 + static_cast<int>(gen.next_u64() % 4);
        out.push_back(detail::random_separable_state(space, gen, max_level, components));
    }
    return out;
}

// Deterministic corpus of generic (typically entangled) random mixed states
// on the low-excitation block; used for identity and consistency checks.
inline std::vector<QuantumState> catalog_random_suite(int count, std::uint64_t seed,
                                                      const FockSpace& space, int max_level = 3,
                                                      int max_components = 4) {
    if (count < 1) throw ParameterOutOfRange("count must be >= 1");
    if (max_level >= std::min(space.cutoff_a, space.cutoff_b))
        throw ParameterOutOfRange("max_level exceeds cutoffs");
    SplitMix64 gen(seed);
    std::vector<QuantumState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int components = 1 + static_cast<int>(gen.next_u64() % max_components);
        Matrix rho = Matrix::Zero(space.dim(), space.dim());
        std::vector<double> weights(static_cast<std::size_t>(components));
        double total = 0.0;
        for (auto& w : weights) {
            w = gen.next_double() + 1e-6;
            total += w;
        }
        for (const double w : weights) {
            Vector v = detail::random_block_vector(space, gen, max_level);
            v.normalize();
            rho += (w / total) * (v * v.adjoint());
        }
        out.push_back(density_state(space, std::move(rho)));
    }
    return out;
}

} // namespace entwit
