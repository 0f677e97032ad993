#ifndef RHSRADAR_RNG_HPP
#define RHSRADAR_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace rhsradar {

/**
 * Seeded random source with a stdlib-independent normal sampler.
 *
 * The uniform and Gaussian mappings are written out explicitly (53-bit
 * mantissa draw, Box-Muller) so a given seed produces the same stream on
 * every platform, which keeps Monte Carlo outputs byte-reproducible.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; caches the second sample of each pair.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Circularly symmetric complex Gaussian with E|w|^2 = variance.
    std::complex<double> complex_normal(double variance) {
        const double scale = std::sqrt(variance * 0.5);
        return {scale * normal(), scale * normal()};
    }

    /// Derives an independent stream seed from a master seed (splitmix64 mix).
    static std::uint64_t derive(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace rhsradar

#endif
