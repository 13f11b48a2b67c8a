#pragma once

// Deterministic RNG streams. Every Monte Carlo trial draws from a stream
// derived from (master_seed, trial_index), so results are identical across
// runs and across parallelism settings. Variates are generated from raw
// engine words (no std::*_distribution), keeping byte-for-byte
// reproducibility across standard libraries.

#include <cmath>
#include <cstdint>
#include <random>

namespace corrline::rng {

// SplitMix64 finalizer; decorrelates consecutive seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1) with 53 random bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // standard normal via the Marsaglia polar method
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Independent stream for one trial of one experiment.
inline Stream derive_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    const std::uint64_t z = mix64(master_seed + 0x9E3779B97F4A7C15ULL * (trial_index + 1));
    return Stream(mix64(z ^ trial_index));
}

// Sub-seed for a named component of a larger experiment.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t component) {
    return mix64(mix64(master_seed) ^ (0xD1B54A32D192ED03ULL * (component + 1)));
}

}  // namespace corrline::rng
