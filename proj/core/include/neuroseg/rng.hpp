#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace neuroseg {

/// Deterministic random source. Wraps std::mt19937_64 but implements the
/// value mappings itself so that streams do not depend on the standard
/// library's distribution internals. Same seed, same platform-independent
/// sequence.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Derive an independent stream, e.g. one per tree or per scene.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        // SplitMix64 step keeps substreams decorrelated for nearby indices.
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        // Rejection sampling removes modulo bias.
        const std::uint64_t limit = span * (UINT64_MAX / span);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return lo + static_cast<std::int64_t>(v % span);
    }

    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
    }

    /// Box-Muller; consumes two uniforms per pair, caches the second.
    double normal(double mean, double sigma) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + sigma * spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        spare_ = mag * std::sin(6.283185307179586 * u2);
        have_spare_ = true;
        return mean + sigma * mag * std::cos(6.283185307179586 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace neuroseg
