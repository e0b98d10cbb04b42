#pragma once

#include <array>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

/// 802.11a OFDM numerology.
inline constexpr double kSubcarrierSpacingHz = 312'500.0;
inline constexpr double kShortFieldSeconds = 8.0e-6;
inline constexpr double kLongFieldSeconds = 8.0e-6;
inline constexpr double kLongGuardSeconds = 1.6e-6;
inline constexpr double kLongSymbolSeconds = 3.2e-6;
inline constexpr double kHighRateHz = 20.0e6;
inline constexpr std::size_t kPreambleLength = 320;

/// Frequency-domain coefficients for subcarriers -26..26 (index 0 is -26),
/// already scaled so that each training field has unit mean power.
const std::array<cplx, 53>& short_training_spectrum();
const std::array<cplx, 53>& long_training_spectrum();

/// True for the rates the preamble synthesizer accepts: 2.5, 5, 10, 20 MHz.
bool is_supported_rate(double fs_hz);

/// Short + long training fields (16 us) evaluated at sample instants n / fs.
/// At 20 MHz this is the standard 320-sample preamble.
ComplexSequence synth_clean_preamble(double fs_hz);

}  // namespace seilab
