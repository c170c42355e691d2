#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nmshrink/error.hpp"

namespace nmshrink {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Seeded random stream with deterministic splitting.
///
/// A stream is identified by a 64-bit key. `split(i)` derives the key of the
/// i-th child purely from (key, i), so replication i always sees the same
/// numbers no matter which thread or in which order it runs.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : key_(seed) { reseed(); }

    [[nodiscard]] RandomStream split(std::uint64_t index) const {
        std::uint64_t s = key_ ^ (0xD1B54A32D192ED03ULL * (index + 1));
        const std::uint64_t a = detail::splitmix64(s);
        const std::uint64_t b = detail::splitmix64(s);
        return RandomStream(a ^ (b << 1), Tag{});
    }

    [[nodiscard]] std::uint64_t key() const { return key_; }

    std::mt19937_64& engine() { return engine_; }

    /// Uniform on the open interval (0, 1).
    double uniform() {
        for (;;) {
            const double u = std::generate_canonical<double, 53>(engine_);
            if (u > 0.0) return u;
        }
    }

    double normal() { return normal_(engine_); }

    /// log of a Gamma(shape, scale 1) variate. Works for tiny shapes where the
    /// variate itself would underflow to zero.
    double log_gamma_variate(double shape) {
        if (!(shape > 0.0) || !std::isfinite(shape))
            throw InputError("gamma shape must be positive and finite");
        if (shape < 1.0) {
            // G(a) = G(a + 1) * U^(1/a)
            return log_gamma_variate(shape + 1.0) + std::log(uniform()) / shape;
        }
        // Marsaglia and Tsang (2000).
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            const double x2 = x * x;
            if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
            if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
        }
    }

    /// Gamma(shape, rate) variate (density proportional to t^(shape-1) e^(-rate t)).
    double gamma(double shape, double rate) {
        if (!(rate > 0.0)) throw InputError("gamma rate must be positive");
        return std::exp(log_gamma_variate(shape)) / rate;
    }

    long long poisson(double mean) {
        if (!(mean >= 0.0) || !std::isfinite(mean)) throw InputError("poisson mean must be finite and >= 0");
        if (mean == 0.0) return 0;
        std::poisson_distribution<long long> dist(mean);
        return dist(engine_);
    }

private:
    struct Tag {};
    RandomStream(std::uint64_t key, Tag) : key_(key) { reseed(); }

    void reseed() {
        std::uint64_t s = key_;
        std::seed_seq seq{static_cast<std::uint32_t>(detail::splitmix64(s)),
                          static_cast<std::uint32_t>(detail::splitmix64(s)),
                          static_cast<std::uint32_t>(detail::splitmix64(s)),
                          static_cast<std::uint32_t>(detail::splitmix64(s))};
        engine_.seed(seq);
        normal_.reset();
    }

    std::uint64_t key_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nmshrink
