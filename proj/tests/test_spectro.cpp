#include <doctest.h>

#include <cmath>
#include <numbers>

#include "checks.hpp"
#include "gen.hpp"
#include "seilab/spectro/augment.hpp"
#include "seilab/spectro/spectrogram.hpp"

using namespace seilab;
using testgen::for_all;
using testgen::Gen;

TEST_CASE("width for the reference configuration and its scaling with F_L") {
    SpectroConfig c;
    CHECK(spectro_width(c) == 63);
    CHECK(spectro_span(c) == 2048);
    c.f_low_hz = 500e3;
    CHECK(spectro_width(c) == 127);
    c.f_low_hz = 1e3;
    CHECK_THROWS(spectro_width(c));
    SpectroConfig bad;
    bad.window = 0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("FFT matches a direct DFT for power-of-two and other lengths") {
    for_all(10, 1, [](Gen& g) {
        for (std::size_t n : {std::size_t(64), g.size(2, 50)}) {
            const auto x = g.samples(n);
            auto y = x;
            fft(y);
            for (std::size_t k = 0; k < n; ++k) {
                cplx want = 0;
                for (std::size_t t = 0; t < n; ++t)
                    want += x[t] * std::polar(1.0, -2 * std::numbers::pi * double(k * t % n) / double(n));
                CHECK(std::abs(y[k] - want) < 1e-9);
            }
        }
    });
}

TEST_CASE("a bin-centred tone under a periodic Hann window fills three bins") {
    const SpectroConfig c;
    const std::size_t k0 = 10, n = c.window;
    std::vector<cplx> v(spectro_span(c));
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = std::polar(1.0, 2 * std::numbers::pi * double(k0 * t) / double(n));
    const auto s = stft_magnitude(ComplexSequence(v, 250e3), c);
    CHECK(s.rows == n);
    CHECK(s.cols == 63);
    for (std::size_t col : {std::size_t(0), std::size_t(31), std::size_t(62)})
        for (std::size_t k = 0; k < n; ++k) {
            const double want = k == k0 ? n / 2.0 : (k == k0 - 1 || k == k0 + 1) ? n / 4.0 : 0.0;
            CHECK(std::abs(s.at(k, col) - want) < 1e-9);
        }
}

TEST_CASE("property: channel-independent spectrogram has M - 1 columns and cancels a constant gain") {
    for_all(20, 2, [](Gen& g) {
        SpectroConfig c;
        c.window = std::size_t(1) << g.size(4, 7);
        c.hop = c.window / 2;
        c.spreading_factor = int(g.size(6, 8));
        c.f_low_hz = g.real(200e3, 400e3);
        const std::size_t m = spectro_width(c);
        const auto sig = g.signal(spectro_span(c), c.f_low_hz);
        const auto a = channel_independent_spectrogram(sig, c);
        CHECK(a.cols == m - 1);
        CHECK(a.rows == c.window);
        CHECK(a.all_finite());
        const cplx gain = std::polar(g.real(0.1, 10), g.real(-3, 3));
        std::vector<cplx> scaled(sig.size());
        for (std::size_t i = 0; i < sig.size(); ++i) scaled[i] = gain * sig[i];
        const auto b = channel_independent_spectrogram(ComplexSequence(scaled, c.f_low_hz), c);
        for (std::size_t i = 0; i < a.data.size(); ++i) CHECK(std::abs(a.data[i] - b.data[i]) < 1e-9);
    });
    const auto r = checks::spectrogram_width(3);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("signals shorter than one window are rejected, shorter than the span are zero-extended") {
    const SpectroConfig c;
    Gen g(4);
    CHECK_THROWS(stft_magnitude(g.signal(63, 250e3), c));
    const auto s = stft_magnitude(g.signal(100, 250e3), c);
    CHECK(s.cols == 63);
    for (std::size_t k = 0; k < s.rows; ++k) CHECK(s.at(k, 62) == 0.0);
}

namespace {

std::vector<cplx> v(const ComplexSequence& s) { return {s.samples().begin(), s.samples().end()}; }

}  // namespace

TEST_CASE("online augmentation") {
    Gen g(5);
    std::vector<ComplexSequence> batch{g.signal(320), g.signal(320)};
    const auto copy = batch;
    const SnrRange off{INFINITY, INFINITY};
    CHECK(off.is_identity());
    const auto same = online_augment(batch, off, 1);
    CHECK(v(same[0]) == v(batch[0]));

    const SnrRange on{9, 30};
    const auto e1 = online_augment(batch, on, augment_seed(7, 1, 0));
    const auto e2 = online_augment(batch, on, augment_seed(7, 2, 0));
    const auto e1b = online_augment(batch, on, augment_seed(7, 1, 0));
    CHECK(v(batch[0]) == v(copy[0]));
    CHECK(v(e1[0]) != v(batch[0]));
    CHECK(v(e1[0]) != v(e2[0]));
    CHECK(v(e1[0]) == v(e1b[0]));
    CHECK(augment_seed(7, 1, 0) != augment_seed(7, 0, 1));

    CHECK(signals_per_pass(13, 128, 10) == 16640);
}
