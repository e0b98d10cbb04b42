#include "seilab/signal/fir.hpp"

#include <cmath>
#include <string>

namespace seilab {

std::vector<double> design_lowpass(double cutoff, std::size_t taps) {
    if (!(cutoff > 0.0 && cutoff <= 0.5)) throw std::invalid_argument("design_lowpass: cutoff must be in (0, 0.5]");
    if (taps % 2 == 0) throw std::invalid_argument("design_lowpass: tap count must be odd");
    std::vector<double> h(taps);
    const double mid = static_cast<double>(taps - 1) / 2.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < taps; ++n) {
        const double t = static_cast<double>(n) - mid;
        const double sinc = t == 0.0 ? 2.0 * cutoff : std::sin(2.0 * kPi * cutoff * t) / (kPi * t);
        const double w = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(taps - 1));
        h[n] = sinc * w;
        sum += h[n];
    }
    for (auto& v : h) v /= sum;
    return h;
}

std::vector<cplx> filter_same(std::span<const cplx> x, std::span<const double> h) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto taps = static_cast<std::ptrdiff_t>(h.size());
    const std::ptrdiff_t delay = (taps - 1) / 2;
    std::vector<cplx> y(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        cplx acc{0.0, 0.0};
        for (std::ptrdiff_t k = 0; k < taps; ++k) {
            const std::ptrdiff_t j = i + delay - k;
            if (j >= 0 && j < n) acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(j)];
        }
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

namespace {

void check_factor(const ComplexSequence& sig, int factor, const char* who) {
    if (factor < 1) throw std::invalid_argument(std::string(who) + ": factor must be >= 1");
    if (sig.size() % static_cast<std::size_t>(factor) != 0)
        throw std::invalid_argument(std::string(who) + ": factor " + std::to_string(factor) +
                                    " does not divide length " + std::to_string(sig.size()));
}

}  // namespace

ComplexSequence pick_every(const ComplexSequence& sig, int factor) {
    check_factor(sig, factor, "pick_every");
    if (factor == 1) return sig;
    std::vector<cplx> out;
    out.reserve(sig.size() / static_cast<std::size_t>(factor));
    for (std::size_t i = 0; i < sig.size(); i += static_cast<std::size_t>(factor)) out.push_back(sig[i]);
    return {std::move(out), sig.fs() / factor};
}

ComplexSequence decimate(const ComplexSequence& sig, int factor) {
    check_factor(sig, factor, "decimate");
    if (factor == 1) return sig;
    const auto h = design_lowpass(kDecimationCutoff / factor);
    ComplexSequence filtered(filter_same(sig.samples(), h), sig.fs());
    return pick_every(filtered, factor);
}

}  // namespace seilab
