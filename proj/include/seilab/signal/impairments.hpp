#pragma once

#include <cstdint>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"

namespace seilab {

/// Transmitter front-end imperfections of one virtual emitter.
struct EmitterProfile {
    int emitter_id = 1;
    double iq_gain_imbalance_db = 0.0;
    double iq_phase_imbalance_rad = 0.0;
    double cfo_hz = 0.0;
    double phase_noise_std_rad = 0.0;  ///< per-sample random-walk increment std
    cplx dc_offset{0.0, 0.0};
    double pa_gain_compression = 0.0;  ///< y = x (1 - a |x|^2)

    bool is_identity() const;
    bool all_finite() const;
};

/// Applies, in transmit-chain order, IQ imbalance, DC offset, cubic PA
/// compression, CFO rotation and a phase-noise random walk. Stages whose
/// parameter is zero are skipped, so the identity profile returns `clean`
/// bit-for-bit. Only the phase-noise stage consumes `seed`.
ComplexSequence apply_impairments(const ComplexSequence& clean, const EmitterProfile& profile,
                                  std::uint64_t seed);

/// The four-emitter fleet used by default experiments. `spread` scales every
/// impairment about zero (1.0 gives the nominal fleet).
std::vector<EmitterProfile> default_fleet(double spread = 1.0);

/// Fleet of `count` emitters that differ only in CFO, evenly spaced in
/// [-spread_hz, +spread_hz].
std::vector<EmitterProfile> cfo_only_fleet(int count, double spread_hz);

/// Euclidean distance between the noiseless fingerprints two emitters impart
/// on the same clean waveform.
double fingerprint_distance(const ComplexSequence& clean, const EmitterProfile& a,
                            const EmitterProfile& b);

}  // namespace seilab
