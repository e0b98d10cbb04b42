#include "seilab/signal/preamble.hpp"

#include <cmath>
#include <string>

namespace seilab {

namespace {

// Both fields carry 52 units of power before scaling.
const double kFieldScale = 1.0 / std::sqrt(52.0);

std::array<cplx, 53> make_short() {
    // Nonzero every 4th subcarrier; sqrt(13/6) * (+-1 +-j).
    static constexpr int kSigns[53] = {
        0, 0, 1, 0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, -1, 0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, 0,
        0, 0, 0, -1, 0, 0, 0, -1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0};
    std::array<cplx, 53> s{};
    const double a = std::sqrt(13.0 / 6.0) * kFieldScale;
    for (int i = 0; i < 53; ++i) s[i] = static_cast<double>(kSigns[i]) * cplx(a, a);
    return s;
}

std::array<cplx, 53> make_long() {
    static constexpr int kVals[53] = {
        1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1, 1, 1, 1, 0,
        1, -1, -1, 1, 1, -1, 1, -1, 1, -1, -1, -1, -1, -1, 1, 1, -1, -1, 1, -1, 1, -1, 1, 1, 1, 1};
    std::array<cplx, 53> l{};
    for (int i = 0; i < 53; ++i) l[i] = cplx(kVals[i] * kFieldScale, 0.0);
    return l;
}

cplx evaluate(const std::array<cplx, 53>& spec, double t) {
    cplx acc{0.0, 0.0};
    for (int i = 0; i < 53; ++i) {
        if (spec[i] == cplx{}) continue;
        const double k = static_cast<double>(i - 26);
        acc += spec[i] * std::polar(1.0, 2.0 * kPi * k * kSubcarrierSpacingHz * t);
    }
    return acc;
}

}  // namespace

const std::array<cplx, 53>& short_training_spectrum() {
    static const auto s = make_short();
    return s;
}

const std::array<cplx, 53>& long_training_spectrum() {
    static const auto l = make_long();
    return l;
}

bool is_supported_rate(double fs_hz) {
    return fs_hz == 2.5e6 || fs_hz == 5.0e6 || fs_hz == 10.0e6 || fs_hz == 20.0e6;
}

ComplexSequence synth_clean_preamble(double fs_hz) {
    if (!is_supported_rate(fs_hz))
        throw std::invalid_argument("synth_clean_preamble: unsupported sampling rate " +
                                    std::to_string(fs_hz) + " Hz (expected 2.5, 5, 10 or 20 MHz)");
    const auto n_short = static_cast<std::size_t>(std::llround(kShortFieldSeconds * fs_hz));
    const auto n_long = static_cast<std::size_t>(std::llround(kLongFieldSeconds * fs_hz));
    std::vector<cplx> out;
    out.reserve(n_short + n_long);
    for (std::size_t n = 0; n < n_short; ++n)
        out.push_back(evaluate(short_training_spectrum(), static_cast<double>(n) / fs_hz));
    // The long field starts with a 1.6 us cyclic prefix, i.e. the last half of
    // a 3.2 us symbol; shifting the time origin by -1.6 us reproduces it.
    for (std::size_t n = 0; n < n_long; ++n) {
        const double t = static_cast<double>(n) / fs_hz - kLongGuardSeconds;
        out.push_back(evaluate(long_training_spectrum(), t));
    }
    return {std::move(out), fs_hz};
}

}  // namespace seilab
