#include "seilab/spectro/augment.hpp"

#include <cmath>
#include <stdexcept>

#include "seilab/rng.hpp"
#include "seilab/signal/noise.hpp"

namespace seilab {

bool SnrRange::is_identity() const { return std::isinf(lo_db) && lo_db > 0 && std::isinf(hi_db) && hi_db > 0; }

std::vector<ComplexSequence> online_augment(const std::vector<ComplexSequence>& minibatch, const SnrRange& range,
                                            std::uint64_t seed) {
    if (minibatch.empty()) throw std::invalid_argument("online_augment: empty minibatch");
    if (range.is_identity()) return minibatch;
    if (!(range.lo_db <= range.hi_db) || !std::isfinite(range.lo_db) || !std::isfinite(range.hi_db))
        throw std::invalid_argument("online_augment: SNR range must be finite with lo <= hi");
    std::vector<ComplexSequence> out;
    out.reserve(minibatch.size());
    Rng rng(derive_seed(seed, {0}));
    for (std::size_t i = 0; i < minibatch.size(); ++i) {
        const double snr = rng.uniform(range.lo_db, range.hi_db);
        out.push_back(add_awgn(minibatch[i], snr, derive_seed(seed, {1, i})));
    }
    return out;
}

std::uint64_t augment_seed(std::uint64_t run_seed, std::uint64_t epoch, std::uint64_t step) {
    return derive_seed(run_seed, {0xA06, epoch, step});
}

std::size_t signals_per_pass(std::size_t steps, std::size_t minibatch, std::size_t realizations) {
    return steps * minibatch * realizations;
}

}  // namespace seilab
