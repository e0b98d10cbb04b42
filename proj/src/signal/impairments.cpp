#include "seilab/signal/impairments.hpp"

#include <cmath>

#include "seilab/rng.hpp"

namespace seilab {

bool EmitterProfile::is_identity() const {
    return iq_gain_imbalance_db == 0.0 && iq_phase_imbalance_rad == 0.0 && cfo_hz == 0.0 &&
           phase_noise_std_rad == 0.0 && dc_offset == cplx{} && pa_gain_compression == 0.0;
}

bool EmitterProfile::all_finite() const {
    return std::isfinite(iq_gain_imbalance_db) && std::isfinite(iq_phase_imbalance_rad) &&
           std::isfinite(cfo_hz) && std::isfinite(phase_noise_std_rad) &&
           std::isfinite(dc_offset.real()) && std::isfinite(dc_offset.imag()) &&
           std::isfinite(pa_gain_compression);
}

ComplexSequence apply_impairments(const ComplexSequence& clean, const EmitterProfile& p,
                                  std::uint64_t seed) {
    if (!p.all_finite()) throw std::invalid_argument("apply_impairments: non-finite profile");
    std::vector<cplx> x(clean.samples().begin(), clean.samples().end());
    const double fs = clean.fs();

    if (p.iq_gain_imbalance_db != 0.0 || p.iq_phase_imbalance_rad != 0.0) {
        // y = mu x + nu conj(x); amplitude/phase error sits on the Q branch.
        const double g = std::pow(10.0, p.iq_gain_imbalance_db / 20.0);
        const double phi = p.iq_phase_imbalance_rad;
        const cplx mu = 0.5 * (1.0 + g * std::polar(1.0, -phi));
        const cplx nu = 0.5 * (1.0 - g * std::polar(1.0, phi));
        for (auto& z : x) z = mu * z + nu * std::conj(z);
    }
    if (p.dc_offset != cplx{}) {
        for (auto& z : x) z += p.dc_offset;
    }
    if (p.pa_gain_compression != 0.0) {
        for (auto& z : x) z *= 1.0 - p.pa_gain_compression * std::norm(z);
    }
    if (p.cfo_hz != 0.0) {
        const double w = 2.0 * kPi * p.cfo_hz / fs;
        for (std::size_t n = 0; n < x.size(); ++n) x[n] *= std::polar(1.0, w * static_cast<double>(n));
    }
    if (p.phase_noise_std_rad != 0.0) {
        Rng rng(seed);
        double theta = 0.0;
        for (std::size_t n = 0; n < x.size(); ++n) {
            if (n > 0) theta += p.phase_noise_std_rad * rng.normal();
            x[n] *= std::polar(1.0, theta);
        }
    }
    return {std::move(x), fs};
}

std::vector<EmitterProfile> default_fleet(double spread) {
    constexpr double kDeg = kPi / 180.0;
    const double cfo[4] = {-2000.0, -700.0, 700.0, 2000.0};
    const double gain_db[4] = {0.2, 0.5, 0.8, 1.1};
    const double phase[4] = {0.5 * kDeg, 1.0 * kDeg, 1.5 * kDeg, 2.0 * kDeg};
    const cplx dc[4] = {{0.004, -0.002}, {-0.003, 0.003}, {0.002, 0.004}, {-0.004, -0.003}};
    const double pa[4] = {0.010, 0.018, 0.006, 0.014};
    std::vector<EmitterProfile> fleet;
    for (int i = 0; i < 4; ++i) {
        EmitterProfile e;
        e.emitter_id = i + 1;
        e.cfo_hz = spread * cfo[i];
        e.iq_gain_imbalance_db = spread * gain_db[i];
        e.iq_phase_imbalance_rad = spread * phase[i];
        e.dc_offset = spread * dc[i];
        e.pa_gain_compression = spread * pa[i];
        e.phase_noise_std_rad = 1.0e-3;
        fleet.push_back(e);
    }
    return fleet;
}

std::vector<EmitterProfile> cfo_only_fleet(int count, double spread_hz) {
    if (count < 1) throw std::invalid_argument("cfo_only_fleet: count must be >= 1");
    std::vector<EmitterProfile> fleet;
    for (int i = 0; i < count; ++i) {
        EmitterProfile e;
        e.emitter_id = i + 1;
        e.cfo_hz = count == 1 ? 0.0 : spread_hz * (2.0 * i / (count - 1) - 1.0);
        fleet.push_back(e);
    }
    return fleet;
}

double fingerprint_distance(const ComplexSequence& clean, const EmitterProfile& a,
                            const EmitterProfile& b) {
    EmitterProfile qa = a, qb = b;
    qa.phase_noise_std_rad = 0.0;
    qb.phase_noise_std_rad = 0.0;
    const auto ya = apply_impairments(clean, qa, 0);
    const auto yb = apply_impairments(clean, qb, 0);
    double acc = 0.0;
    for (std::size_t i = 0; i < ya.size(); ++i) acc += std::norm(ya[i] - yb[i]);
    return std::sqrt(acc);
}

}  // namespace seilab
