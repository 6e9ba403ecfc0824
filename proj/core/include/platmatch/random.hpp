#pragma once

#include <cstdint>
#include <random>

namespace platmatch {

std::uint64_t splitmix64(std::uint64_t x);
/// Independent stream seed for trial `trial` of a suite seeded with `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return splitmix64(seed ^ splitmix64(trial + 1)); }

/// mt19937_64 with distribution transforms written out, so draws are identical across standard
/// library implementations (the std distributions are implementation-defined).
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}

    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box-Muller.
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    bool coin(double p = 0.5) { return uniform() < p; }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace platmatch
