#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

struct SpectroConfig {
    std::size_t window = 64;  ///< N
    std::size_t hop = 32;     ///< R
    int spreading_factor = 7;
    double bandwidth_hz = 125e3;
    double f_low_hz = 250e3;

    void validate() const;
};

/// Bandwidth used for 802.11a inputs: the occupied band at 20 MHz scaled by
/// f_low / 20 MHz.
double wifi_bandwidth_for(double f_low_hz);

/// M = (8 * 2^SF / B * F_L - N) / R + 1, floored. Throws when M < 2 would
/// leave no log-ratio column.
std::size_t spectro_width(const SpectroConfig& cfg);

/// Samples covered by M hops: (M - 1) * R + N.
std::size_t spectro_span(const SpectroConfig& cfg);

/// Real matrix, row-major: rows are frequency bins, columns are time.
struct Spectrogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    bool all_finite() const;
};

/// In-place radix-2 FFT for power-of-two lengths; other lengths fall back to a
/// direct DFT.
void fft(std::vector<cplx>& x);

/// Hann-windowed STFT magnitudes, N x M. Signals shorter than the span are
/// zero-extended; shorter than one window is rejected.
Spectrogram stft_magnitude(const ComplexSequence& sig, const SpectroConfig& cfg);

/// ln(|S[k, m+1]| / |S[k, m]|) for adjacent STFT columns, N x (M - 1).
/// Magnitudes are floored at 1e-12. A constant complex gain cancels.
Spectrogram channel_independent_spectrogram(const ComplexSequence& sig, const SpectroConfig& cfg);

std::string spectrogram_csv(const Spectrogram& s);

}  // namespace seilab
