#pragma once

#include <cstdint>
#include <random>

namespace droso {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of the index-th child stream of `master`. Used for ensemble members,
/// synthetic frames and sweep cells so that one integer reproduces a whole run.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    return mix64(master ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/// Deterministic random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the standard; the distributions are implemented here
/// because the std:: ones are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t x = engine_();
            if (x >= threshold) return x % bound;
        }
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal sample (Box-Muller, one value per call).
    double normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace droso
