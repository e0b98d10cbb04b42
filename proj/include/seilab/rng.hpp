#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace seilab {

/// splitmix64 finalizer; the mixing step of every seed derivation.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed and an ordered list of tags.
///
/// Splitting rule: s <- mix64(s ^ mix64(tag + 0x9E3779B97F4A7C15 * (i + 1)))
/// for the i-th tag. Workers that own distinct tag tuples get independent
/// streams, and the mapping never depends on scheduling order.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> tags);

/// Deterministic random source. Distributions are implemented here rather than
/// through <random> adaptors so that streams are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; caches the second variate.
    double normal();
    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n);

    template <typename It>
    void shuffle(It first, It last) {
        auto n = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = n; i > 1; --i) {
            auto j = below(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace seilab
