#pragma once

#include <array>
#include <cstdint>

namespace qsocp {

/// xoshiro256** seeded through splitmix64.
///
///   splitmix64: z = (s += 0x9E3779B97F4A7C15);
///               z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
///               z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
///               return z ^ (z >> 31);
///   next:       r = rotl(s1 * 5, 7) * 9; t = s1 << 17;
///               s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45);
///
/// uniform() = (next() >> 11) * 2^-53 in [0, 1). normal() uses Box-Muller
/// with u1 = 1 - uniform() and discards the sine branch.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept;

    std::uint64_t next() noexcept;
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() noexcept;
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
    bool bernoulli(double p) noexcept { return uniform() < p; }

private:
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace qsocp
