#pragma once

#include <span>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

inline constexpr std::size_t kLowpassTaps = 81;
/// Anti-alias cutoff as a fraction of the output sampling rate.
inline constexpr double kDecimationCutoff = 0.45;
/// One-sided occupied bandwidth of the 802.11a training fields (26.5 subcarriers).
inline constexpr double kOccupiedHalfBandwidthHz = 26.5 * 312'500.0;

/// Linear-phase Hamming-windowed sinc low-pass with unit DC gain.
/// `cutoff` is in cycles per sample, in (0, 0.5].
std::vector<double> design_lowpass(double cutoff, std::size_t taps = kLowpassTaps);

/// Convolution aligned on the filter's group delay; the output has the input's
/// length and the input is zero-extended at both ends.
std::vector<cplx> filter_same(std::span<const cplx> x, std::span<const double> h);

/// Keeps samples 0, V, 2V, ... with no filtering.
ComplexSequence pick_every(const ComplexSequence& sig, int factor);

/// Anti-alias low-pass (cutoff 0.45 * fs / V) followed by pick_every.
/// Throws when V < 1 or V does not divide the length.
ComplexSequence decimate(const ComplexSequence& sig, int factor);

}  // namespace seilab
