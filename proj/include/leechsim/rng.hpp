#pragma once

#include <cstdint>
#include <random>

namespace leechsim {

// splitmix64 finalizer. Full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed-splitting rule: the seed of stream `index` under `master` depends only
// on (master, index), so ensembles are reproducible regardless of the order
// trials execute in.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 1));
}

// Deterministic uniform source. The draw-to-value mappings live here rather
// than in <random> distributions because the standard does not pin the bit
// streams of uniform_real/normal across library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return next_double() < p; }

    // Uniform integer in [0, n). Modulo bias is < n / 2^64, irrelevant here.
    int next_below(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace leechsim
