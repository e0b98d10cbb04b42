#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// The 9..30 dB grid in 3 dB steps.
std::vector<double> default_snr_grid();

/// Complex white Gaussian noise shaped by the occupied-band low-pass, with unit
/// mean power over the returned `length` samples.
std::vector<cplx> like_filtered_noise(std::size_t length, double fs_hz, std::uint64_t seed);

/// Adds like-filtered complex Gaussian noise. The noise realization is scaled
/// so that (signal power) / (added noise power) equals snr_db on this record.
/// snr_db = +inf returns sig unchanged.
ComplexSequence add_awgn(const ComplexSequence& sig, double snr_db, std::uint64_t seed);

/// 10 log10(P_signal / P_noise) measured from a clean/noisy pair.
double measured_snr_db(const ComplexSequence& clean, const ComplexSequence& noisy);

}  // namespace seilab
