#pragma once

#include <span>
#include <vector>

#include "seilab/common.hpp"

namespace seilab {

/// Complex baseband samples at a fixed sampling frequency.
class ComplexSequence {
public:
    ComplexSequence(std::vector<cplx> samples, double fs_hz);

    std::span<const cplx> samples() const { return samples_; }
    std::vector<cplx>& mutable_samples() { return samples_; }
    double fs() const { return fs_; }
    std::size_t size() const { return samples_.size(); }
    double duration() const { return static_cast<double>(samples_.size()) / fs_; }
    const cplx& operator[](std::size_t i) const { return samples_[i]; }

    /// Mean of |z|^2 over all samples.
    double mean_power() const;
    bool all_finite() const;

    friend bool operator==(const ComplexSequence&, const ComplexSequence&) = default;

private:
    std::vector<cplx> samples_;
    double fs_;
};

/// Returns sig scaled to unit mean power. A zero-power input is returned as is.
ComplexSequence normalize_power(const ComplexSequence& sig);

}  // namespace seilab
