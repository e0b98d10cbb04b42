#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seilab/eval/report.hpp"

namespace seilab::checks {

struct CheckResult {
    bool pass = false;
    std::string detail;
};

/// LAI reproduces degree <= 1 and CSI degree <= 3 polynomials; knot values exact.
CheckResult interpolation_exactness(std::uint64_t seed);
/// Value and first-derivative continuity of the spline at interior knots.
CheckResult spline_continuity(std::uint64_t seed, int signals = 100);
/// Central finite differences against backward() for every layer kind and both losses.
CheckResult gradient_suite(std::uint64_t seed);
/// D = 0.5 everywhere gives d_loss = 2 ln 2.
CheckResult gan_equilibrium();
/// Generator and label-channel shapes for every collection rate.
CheckResult shape_contracts();
/// Empirical SNR of add_awgn over 100 trials per grid point.
CheckResult snr_calibration(std::uint64_t seed);
/// Width formula, M - 1 output width on random configs, gain invariance.
CheckResult spectrogram_width(std::uint64_t seed);

/// Per-seed outcome of the desk-scale directional experiment.
struct DeskOutcome {
    std::uint64_t seed = 0;
    std::vector<EvalReport> reports;
    std::map<std::string, std::string> csvs;
    double seconds = 0.0;

    const EvalReport* find(Method m, double f_low_hz) const;
    /// full_rate average > 90% at every SNR >= 21 dB.
    CheckResult full_rate_high_snr() const;
    /// mean-over-SNR cgan >= cnn_only at 5 MHz.
    CheckResult cgan_vs_cnn_only() const;
    /// csi >= lai (mean over SNR) at 2.5 and 5 MHz.
    CheckResult csi_vs_lai() const;
    /// full_rate >= cgan at every SNR (5 MHz).
    CheckResult full_rate_vs_cgan() const;
};

/// Desk preset for `seed`; `all_rates` keeps every configured rate, otherwise
/// only 2.5 and 5 MHz are run.
DeskOutcome run_desk(std::uint64_t seed, bool all_rates, const std::function<void(const std::string&)>& progress = {});

}  // namespace seilab::checks
