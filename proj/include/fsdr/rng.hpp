#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fsdr {

/// SplitMix64 finalizer; used to decorrelate (seed, stream) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Deterministic random stream.
///
/// Generator version 1: std::mt19937_64 (whose output sequence the C++
/// standard fixes) seeded with splitmix64-mixed stream coordinates.
/// Uniforms take the top 53 bits. Normals use the Box-Muller transform,
/// consuming two uniforms per pair and caching the second variate.
/// Poisson uses sequential CDF inversion; exponentials use -log(1-u).
/// Library distributions (std::normal_distribution etc.) are avoided on
/// purpose because their algorithms are implementation-defined.
class Rng {
public:
    static constexpr int generator_version = 1;

    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent substream addressed by (seed, a) or (seed, a, b).
    static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ (a + 0x632BE59BD9B4E019ull));
        h = splitmix64(h ^ (b + 0x8CB92BA72F3D8DD7ull));
        return Rng(h);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate = 1.0) { return -std::log(1.0 - uniform()) / rate; }

    /// Poisson variate by inversion; intended for small rates.
    int poisson(double rate = 1.0) {
        const double u = uniform();
        double p = std::exp(-rate);
        double cdf = p;
        int k = 0;
        while (u >= cdf && k < 10000) {
            ++k;
            p *= rate / k;
            cdf += p;
        }
        return k;
    }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace fsdr
