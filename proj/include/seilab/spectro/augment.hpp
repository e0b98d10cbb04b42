#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

/// SNR interval (dB) from which each augmented example draws uniformly.
/// lo = hi = +inf disables augmentation.
struct SnrRange {
    double lo_db = 9.0;
    double hi_db = 30.0;

    bool is_identity() const;
};

/// Fresh AWGN on every example of a minibatch. The input is not modified.
std::vector<ComplexSequence> online_augment(const std::vector<ComplexSequence>& minibatch, const SnrRange& range,
                                            std::uint64_t seed);

/// Seed of the noise drawn for one (epoch, step) of a training run.
std::uint64_t augment_seed(std::uint64_t run_seed, std::uint64_t epoch, std::uint64_t step);

/// Noisy signals seen per pass: steps x minibatch x noise realizations.
std::size_t signals_per_pass(std::size_t steps, std::size_t minibatch, std::size_t realizations);

}  // namespace seilab
