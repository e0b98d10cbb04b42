#include "seilab/spectro/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "seilab/common.hpp"
#include "seilab/signal/fir.hpp"
#include "seilab/signal/preamble.hpp"

namespace seilab {

namespace {

constexpr double kSpectroFloor = 1e-12;

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void SpectroConfig::validate() const {
    if (window == 0 || hop == 0) throw std::invalid_argument("spectrogram: window and hop must be positive");
    if (window % hop != 0) throw std::invalid_argument("spectrogram: window must be a multiple of the hop");
    if (spreading_factor < 1 || spreading_factor > 30)
        throw std::invalid_argument("spectrogram: spreading factor out of range");
    if (!(bandwidth_hz > 0.0) || !(f_low_hz > 0.0) || !std::isfinite(bandwidth_hz) || !std::isfinite(f_low_hz))
        throw std::invalid_argument("spectrogram: bandwidth and sampling frequency must be positive");
}

double wifi_bandwidth_for(double f_low_hz) { return 2.0 * kOccupiedHalfBandwidthHz * f_low_hz / kHighRateHz; }

std::size_t spectro_width(const SpectroConfig& cfg) {
    cfg.validate();
    const double samples = 8.0 * std::ldexp(1.0, cfg.spreading_factor) / cfg.bandwidth_hz * cfg.f_low_hz;
    const double m = std::floor((samples - double(cfg.window)) / double(cfg.hop) + 1e-9) + 1.0;
    if (m < 2.0)
        throw std::invalid_argument("spectrogram: signal of " + std::to_string(samples) +
                                    " samples yields fewer than two windows");
    return static_cast<std::size_t>(m);
}

std::size_t spectro_span(const SpectroConfig& cfg) { return (spectro_width(cfg) - 1) * cfg.hop + cfg.window; }

bool Spectrogram::all_finite() const {
    return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
}

void fft(std::vector<cplx>& x) {
    const std::size_t n = x.size();
    if (n <= 1) return;
    if (!is_pow2(n)) {
        std::vector<cplx> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            cplx acc = 0;
            for (std::size_t t = 0; t < n; ++t) acc += x[t] * std::polar(1.0, -2.0 * kPi * double(k * t % n) / double(n));
            out[k] = acc;
        }
        x = std::move(out);
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const cplx w = std::polar(1.0, -2.0 * kPi / double(len));
        for (std::size_t i = 0; i < n; i += len) {
            cplx wk = 1.0;
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = x[i + k];
                const cplx v = x[i + k + len / 2] * wk;
                x[i + k] = u + v;
                x[i + k + len / 2] = u - v;
                wk *= w;
            }
        }
    }
}

Spectrogram stft_magnitude(const ComplexSequence& sig, const SpectroConfig& cfg) {
    const std::size_t m = spectro_width(cfg);
    const std::size_t n = cfg.window;
    if (sig.size() < n)
        throw std::invalid_argument("spectrogram: signal of " + std::to_string(sig.size()) +
                                    " samples is shorter than one window of " + std::to_string(n));
    if (!sig.all_finite()) throw std::invalid_argument("spectrogram: non-finite input");
    std::vector<double> hann(n);
    for (std::size_t i = 0; i < n; ++i) hann[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * double(i) / double(n));
    Spectrogram s{n, m, std::vector<double>(n * m)};
    std::vector<cplx> frame(n);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t t = c * cfg.hop + i;
            frame[i] = t < sig.size() ? sig[t] * hann[i] : cplx{};
        }
        fft(frame);
        for (std::size_t k = 0; k < n; ++k) s.data[k * m + c] = std::abs(frame[k]);
    }
    return s;
}

Spectrogram channel_independent_spectrogram(const ComplexSequence& sig, const SpectroConfig& cfg) {
    const auto mag = stft_magnitude(sig, cfg);
    Spectrogram out{mag.rows, mag.cols - 1, std::vector<double>(mag.rows * (mag.cols - 1))};
    for (std::size_t k = 0; k < mag.rows; ++k)
        for (std::size_t c = 0; c + 1 < mag.cols; ++c)
            out.data[k * out.cols + c] =
                std::log(std::max(mag.at(k, c + 1), kSpectroFloor)) - std::log(std::max(mag.at(k, c), kSpectroFloor));
    return out;
}

std::string spectrogram_csv(const Spectrogram& s) {
    std::ostringstream os;
    char buf[32];
    for (std::size_t r = 0; r < s.rows; ++r) {
        for (std::size_t c = 0; c < s.cols; ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", s.at(r, c));
            os << (c ? "," : "") << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace seilab
