#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ucs {

// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seedable, splittable generator: mt19937_64 seeded through SplitMix64.
// All variates are produced by hand from raw 64-bit outputs so a given seed
// yields the same stream on every standard library.
class Rng {
public:
    static constexpr std::string_view name = "mt19937_64/splitmix64-seeded";

    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const noexcept { return seed_; }

    // Child generator for stream `stream`; deterministic in (seed, stream).
    Rng split(std::uint64_t stream) const;

    std::uint64_t next_u64() { return engine_(); }
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Uniform integer in [0, bound), rejection-sampled (no modulo bias).
    std::uint64_t uniform_index(std::uint64_t bound);
    bool bernoulli(double p) { return uniform() < p; }
    // Standard normal via the polar Box-Muller method.
    double normal();

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

}  // namespace ucs
