#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "seilab/rng.hpp"
#include "seilab/signal/complex_sequence.hpp"

namespace seilab::testgen {

/// Small hand-rolled generators for property tests.
struct Gen {
    Rng rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t size(std::size_t lo, std::size_t hi) { return lo + rng.below(hi - lo + 1); }
    double real(double lo, double hi) { return rng.uniform(lo, hi); }
    cplx complex() { return {rng.normal(), rng.normal()}; }

    std::vector<cplx> samples(std::size_t n) {
        std::vector<cplx> v(n);
        for (auto& z : v) z = complex();
        return v;
    }
    ComplexSequence signal(std::size_t n, double fs = 20e6) { return ComplexSequence(samples(n), fs); }
};

/// Runs `body` on `cases` generated inputs; each case gets its own seed.
template <typename F>
void for_all(int cases, std::uint64_t seed, F body) {
    for (int i = 0; i < cases; ++i) {
        Gen g(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        body(g);
    }
}

}  // namespace seilab::testgen
