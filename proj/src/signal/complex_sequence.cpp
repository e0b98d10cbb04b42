#include "seilab/signal/complex_sequence.hpp"

#include <cmath>
#include <string>

namespace seilab {

ComplexSequence::ComplexSequence(std::vector<cplx> samples, double fs_hz)
    : samples_(std::move(samples)), fs_(fs_hz) {
    if (samples_.empty()) throw std::invalid_argument("ComplexSequence: samples must be nonempty");
    if (!(fs_ > 0.0) || !std::isfinite(fs_))
        throw std::invalid_argument("ComplexSequence: fs must be positive, got " + std::to_string(fs_));
}

double ComplexSequence::mean_power() const {
    double acc = 0.0;
    for (const auto& z : samples_) acc += std::norm(z);
    return acc / static_cast<double>(samples_.size());
}

bool ComplexSequence::all_finite() const {
    for (const auto& z : samples_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

ComplexSequence normalize_power(const ComplexSequence& sig) {
    const double p = sig.mean_power();
    if (p <= 0.0) return sig;
    const double g = 1.0 / std::sqrt(p);
    std::vector<cplx> out(sig.samples().begin(), sig.samples().end());
    for (auto& z : out) z *= g;
    return {std::move(out), sig.fs()};
}

}  // namespace seilab
