#include "seilab/signal/noise.hpp"

#include <algorithm>
#include <cmath>

#include "seilab/rng.hpp"
#include "seilab/signal/fir.hpp"

namespace seilab {

std::vector<double> default_snr_grid() {
    std::vector<double> g;
    for (int s = 9; s <= 30; s += 3) g.push_back(static_cast<double>(s));
    return g;
}

std::vector<cplx> like_filtered_noise(std::size_t length, double fs_hz, std::uint64_t seed) {
    Rng rng(seed);
    const double cutoff = kOccupiedHalfBandwidthHz / fs_hz;
    std::vector<cplx> noise;
    if (cutoff >= 0.5) {
        // Occupied band covers the whole Nyquist range: white noise is already in-band.
        noise.resize(length);
        for (auto& z : noise) z = cplx(rng.normal(), rng.normal());
    } else {
        // Generate a margin on both sides so the kept span has no edge transient.
        const std::size_t margin = kLowpassTaps;
        std::vector<cplx> white(length + 2 * margin);
        for (auto& z : white) z = cplx(rng.normal(), rng.normal());
        const auto h = design_lowpass(cutoff);
        const auto shaped = filter_same(white, h);
        noise.assign(shaped.begin() + static_cast<std::ptrdiff_t>(margin),
                     shaped.begin() + static_cast<std::ptrdiff_t>(margin + length));
    }
    double p = 0.0;
    for (const auto& z : noise) p += std::norm(z);
    p /= static_cast<double>(length);
    const double g = 1.0 / std::sqrt(p);
    for (auto& z : noise) z *= g;
    return noise;
}

ComplexSequence add_awgn(const ComplexSequence& sig, double snr_db, std::uint64_t seed) {
    if (!sig.all_finite()) throw std::invalid_argument("add_awgn: signal contains non-finite samples");
    if (std::isinf(snr_db) && snr_db > 0) return sig;
    if (!std::isfinite(snr_db)) throw std::invalid_argument("add_awgn: snr_db must be finite or +inf");
    const auto noise = like_filtered_noise(sig.size(), sig.fs(), seed);
    const double scale = std::sqrt(sig.mean_power() / std::pow(10.0, snr_db / 10.0));
    std::vector<cplx> out(sig.samples().begin(), sig.samples().end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * noise[i];
    return {std::move(out), sig.fs()};
}

double measured_snr_db(const ComplexSequence& clean, const ComplexSequence& noisy) {
    if (clean.size() != noisy.size()) throw std::invalid_argument("measured_snr_db: length mismatch");
    double pn = 0.0;
    for (std::size_t i = 0; i < clean.size(); ++i) pn += std::norm(noisy[i] - clean[i]);
    pn /= static_cast<double>(clean.size());
    return 10.0 * std::log10(clean.mean_power() / pn);
}

}  // namespace seilab
