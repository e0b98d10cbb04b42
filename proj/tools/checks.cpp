#include "checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "seilab/cgan/cgan.hpp"
#include "seilab/config/experiment_config.hpp"
#include "seilab/nn/loss.hpp"
#include "seilab/nn/network.hpp"
#include "seilab/pipeline/pipeline.hpp"
#include "seilab/resample/interpolate.hpp"
#include "seilab/rng.hpp"
#include "seilab/signal/noise.hpp"
#include "seilab/signal/preamble.hpp"
#include "seilab/spectro/spectrogram.hpp"
#include "seilab/tensorize/label_embedder.hpp"

namespace seilab::checks {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

cplx random_complex(Rng& r) { return {r.normal(), r.normal()}; }

// --- interpolation -------------------------------------------------------

cplx poly(const std::vector<cplx>& a, double u) {
    cplx v = 0;
    for (std::size_t k = a.size(); k-- > 0;) v = v * u + a[k];
    return v;
}

/// Largest deviation of an upsampler from the polynomial it was fed.
double poly_error(Rng& r, std::size_t n, int factor, int degree, bool cubic) {
    std::vector<cplx> a(static_cast<std::size_t>(degree) + 1);
    for (auto& c : a) c = random_complex(r);
    const double scale = 1.0 / static_cast<double>(n);
    std::vector<cplx> knots(n);
    for (std::size_t i = 0; i < n; ++i) knots[i] = poly(a, static_cast<double>(i) * scale);
    const ComplexSequence sig(knots, 5e6);
    const auto up = cubic ? csi_upsample(sig, factor) : lai_upsample(sig, factor);
    double worst = 0.0;
    for (std::size_t j = 0; j < up.size(); ++j) {
        const double t = static_cast<double>(j) / factor;
        worst = std::max(worst, std::abs(up[j] - poly(a, t * scale)));
    }
    return worst;
}

// --- gradients -----------------------------------------------------------

double rel_error(const std::vector<double>& a, const std::vector<double>& n) {
    double diff = 0, na = 0, nn = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - n[i]) * (a[i] - n[i]);
        na += a[i] * a[i];
        nn += n[i] * n[i];
    }
    const double denom = std::sqrt(na) + std::sqrt(nn);
    return denom < 1e-12 ? std::sqrt(diff) : std::sqrt(diff) / denom;
}

constexpr double kStep = 1e-5;

/// Worst relative error of input and parameter gradients of a one-layer
/// network under L = sum(w * y).
double layer_gradient_error(const nn::LayerSpec& spec, const nn::Shape& in, nn::Tensor<double> x, Rng& r,
                            bool input_differentiable) {
    nn::Network<double> net(in, {spec}, r.next_u64());
    for (auto* p : net.parameters())
        for (auto& v : p->value.values()) v = r.uniform(-1.0, 1.0);
    const auto& y0 = net.forward(x);
    nn::Tensor<double> w(y0.shape());
    for (auto& v : w.values()) v = r.uniform(-1.0, 1.0);
    auto loss = [&]() {
        const auto& y = net.forward(x);
        double s = 0;
        for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
        return s;
    };
    net.zero_grad();
    net.forward(x);
    const auto dx = net.backward(w);

    double worst = 0.0;
    if (input_differentiable) {
        std::vector<double> an(dx.values().begin(), dx.values().end()), num(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double keep = x[i];
            x[i] = keep + kStep;
            const double lp = loss();
            x[i] = keep - kStep;
            const double lm = loss();
            x[i] = keep;
            num[i] = (lp - lm) / (2 * kStep);
        }
        worst = std::max(worst, rel_error(an, num));
    }
    for (auto* p : net.parameters()) {
        std::vector<double> an(p->grad.values().begin(), p->grad.values().end()), num(p->value.size());
        for (std::size_t i = 0; i < p->value.size(); ++i) {
            const double keep = p->value[i];
            p->value[i] = keep + kStep;
            const double lp = loss();
            p->value[i] = keep - kStep;
            const double lm = loss();
            p->value[i] = keep;
            num[i] = (lp - lm) / (2 * kStep);
        }
        worst = std::max(worst, rel_error(an, num));
    }
    return worst;
}

std::size_t pick(Rng& r, std::size_t lo, std::size_t hi) { return lo + r.below(hi - lo + 1); }

/// Random input away from the kinks of ReLU and with distinct values for max-pooling.
nn::Tensor<double> random_input(const nn::Shape& batch_shape, Rng& r) {
    nn::Tensor<double> x(batch_shape);
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    r.shuffle(order.begin(), order.end());
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = -1.0 + 2.0 * (static_cast<double>(order[i]) + 0.5) / n;
        if (std::abs(v) < 0.02) v = v < 0 ? -0.02 : 0.02;
        x[i] = v;
    }
    return x;
}

nn::Shape with_batch(std::size_t n, const nn::Shape& s) {
    nn::Shape out{n};
    out.insert(out.end(), s.begin(), s.end());
    return out;
}

}  // namespace

CheckResult interpolation_exactness(std::uint64_t seed) {
    const auto t0 = Clock::now();
    Rng r(seed);
    double lai = 0, csi = 0, knots = 0;
    for (std::size_t n : {4, 5, 6, 9, 16, 40, 80}) {
        for (int v : {2, 4, 8}) {
            for (int d = 0; d <= 1; ++d) lai = std::max(lai, poly_error(r, n, v, d, false));
            for (int d = 0; d <= 3; ++d) csi = std::max(csi, poly_error(r, n, v, d, true));
            std::vector<cplx> vals(n);
            for (auto& z : vals) z = random_complex(r);
            const ComplexSequence sig(vals, 5e6);
            const auto a = lai_upsample(sig, v), b = csi_upsample(sig, v);
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t j = i * static_cast<std::size_t>(v);
                knots = std::max({knots, std::abs(a[j] - vals[i]), std::abs(b[j] - vals[i])});
            }
        }
    }
    const double secs = seconds_since(t0);
    CheckResult res;
    res.pass = lai <= 1e-9 && csi <= 1e-9 && knots <= 1e-12 && secs < 1.0;
    res.detail = "lai err " + fmt("%.2e", lai) + ", csi err " + fmt("%.2e", csi) + ", knot err " +
                 fmt("%.2e", knots) + ", " + fmt("%.3f", secs) + " s";
    return res;
}

CheckResult spline_continuity(std::uint64_t seed, int signals) {
    const auto t0 = Clock::now();
    Rng r(seed);
    double value = 0, slope = 0, knot = 0;
    for (int s = 0; s < signals; ++s) {
        std::vector<cplx> vals(pick(r, 4, 80));
        for (auto& z : vals) z = random_complex(r);
        const CubicSpline spline(KnotGrid::uniform(vals));
        const auto pieces = spline.pieces();
        for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
            const double t = static_cast<double>(i);
            const auto& left = pieces[i - 1];
            const auto& right = pieces[i];
            value = std::max(value, std::abs(left.value(t) - right.value(t)));
            slope = std::max(slope, std::abs(left.derivative(t) - right.derivative(t)));
            knot = std::max({knot, std::abs(left.value(t) - vals[i]), std::abs(right.value(t) - vals[i])});
        }
    }
    const double secs = seconds_since(t0);
    CheckResult res;
    res.pass = value <= 1e-9 && slope <= 1e-9 && knot <= 1e-9 && secs < 5.0;
    res.detail = std::to_string(signals) + " signals: value jump " + fmt("%.2e", value) + ", slope jump " +
                 fmt("%.2e", slope) + ", knot err " + fmt("%.2e", knot) + ", " + fmt("%.3f", secs) + " s";
    return res;
}

CheckResult gradient_suite(std::uint64_t seed) {
    using nn::LayerSpec;
    const auto t0 = Clock::now();
    Rng r(seed);
    std::map<std::string, double> worst;
    auto note = [&](const std::string& name, double e) { worst[name] = std::max(worst[name], e); };

    for (int trial = 0; trial < 3; ++trial) {
        const std::size_t batch = pick(r, 1, 3);
        const nn::Shape img{pick(r, 1, 3), pick(r, 1, 4), pick(r, 3, 9)};

        const auto kh = static_cast<std::uint32_t>(2 * pick(r, 0, 1) + 1);
        const auto kw = static_cast<std::uint32_t>(2 * pick(r, 0, 2) + 1);
        const auto conv = LayerSpec::conv2d(static_cast<std::uint32_t>(pick(r, 1, 4)), kh, kw);
        note("conv2d", layer_gradient_error(conv, img, random_input(with_batch(batch, img), r), r, true));

        const auto dense = LayerSpec::dense(static_cast<std::uint32_t>(pick(r, 1, 6)));
        note("dense", layer_gradient_error(dense, img, random_input(with_batch(batch, img), r), r, true));

        for (auto [name, spec] : {std::pair{"relu", LayerSpec::relu()}, std::pair{"sigmoid", LayerSpec::sigmoid()},
                                  std::pair{"softmax", LayerSpec::softmax()}, std::pair{"flatten", LayerSpec::flatten()}})
            note(name, layer_gradient_error(spec, img, random_input(with_batch(batch, img), r), r, true));

        const auto ph = static_cast<std::uint32_t>(pick(r, 1, std::min<std::size_t>(2, img[1])));
        const auto pw = static_cast<std::uint32_t>(pick(r, 2, 3));
        note("maxpool2d",
             layer_gradient_error(LayerSpec::maxpool2d(ph, pw), img, random_input(with_batch(batch, img), r), r, true));

        const auto up = LayerSpec::upsample2d(static_cast<std::uint32_t>(pick(r, 1, 2)),
                                              static_cast<std::uint32_t>(pick(r, 2, 3)));
        note("upsample2d", layer_gradient_error(up, img, random_input(with_batch(batch, img), r), r, true));

        const auto vocab = static_cast<std::uint32_t>(pick(r, 2, 6));
        const auto emb = LayerSpec::embedding(vocab, static_cast<std::uint32_t>(pick(r, 1, 8)));
        nn::Tensor<double> idx({batch + 2, 1});
        for (auto& v : idx.values()) v = static_cast<double>(r.below(vocab));
        note("embedding", layer_gradient_error(emb, {1}, idx, r, false));

        // categorical cross-entropy: against probabilities and through softmax logits
        const std::size_t n = pick(r, 1, 5), k = pick(r, 2, 6);
        std::vector<int> labels(n);
        for (auto& l : labels) l = static_cast<int>(r.below(k));
        nn::Tensor<double> z({n, k});
        for (auto& v : z.values()) v = r.normal();
        auto softmax = [&](const nn::Tensor<double>& logits) {
            nn::Tensor<double> p(logits.shape());
            for (std::size_t i = 0; i < n; ++i) {
                double m = -1e300, s = 0;
                for (std::size_t j = 0; j < k; ++j) m = std::max(m, logits[i * k + j]);
                for (std::size_t j = 0; j < k; ++j) s += std::exp(logits[i * k + j] - m);
                for (std::size_t j = 0; j < k; ++j) p[i * k + j] = std::exp(logits[i * k + j] - m) / s;
            }
            return p;
        };
        auto probs = softmax(z);
        const auto ce = nn::categorical_cross_entropy<double>(probs, labels);
        std::vector<double> an_p(ce.grad_probs.values().begin(), ce.grad_probs.values().end()), num_p(probs.size());
        std::vector<double> an_z(ce.grad_logits.values().begin(), ce.grad_logits.values().end()), num_z(z.size());
        for (std::size_t i = 0; i < probs.size(); ++i) {
            auto p = probs;
            p[i] += kStep;
            const double lp = nn::categorical_cross_entropy<double>(p, labels).loss;
            p[i] -= 2 * kStep;
            const double lm = nn::categorical_cross_entropy<double>(p, labels).loss;
            num_p[i] = (lp - lm) / (2 * kStep);
            auto zz = z;
            zz[i] += kStep;
            const double zp = nn::categorical_cross_entropy<double>(softmax(zz), labels).loss;
            zz[i] -= 2 * kStep;
            const double zm = nn::categorical_cross_entropy<double>(softmax(zz), labels).loss;
            num_z[i] = (zp - zm) / (2 * kStep);
        }
        note("cross_entropy", std::max(rel_error(an_p, num_p), rel_error(an_z, num_z)));

        // adversarial losses: probabilities and sigmoid logits, both generator modes
        const std::size_t m = pick(r, 1, 6);
        nn::Tensor<double> lr({m, 1}), lf({m, 1});
        for (auto& v : lr.values()) v = r.uniform(-2.5, 2.5);
        for (auto& v : lf.values()) v = r.uniform(-2.5, 2.5);
        auto sig = [](nn::Tensor<double> t) {
            for (auto& v : t.values()) v = 1.0 / (1.0 + std::exp(-v));
            return t;
        };
        for (auto mode : {nn::GeneratorLoss::NonSaturating, nn::GeneratorLoss::Minimax}) {
            const auto g = nn::gan_losses<double>(sig(lr), sig(lf), mode);
            auto grads = [&](auto field_loss, bool wrt_real, bool logits) {
                std::vector<double> num(m);
                for (std::size_t i = 0; i < m; ++i) {
                    auto a = logits ? lr : sig(lr);
                    auto b = logits ? lf : sig(lf);
                    auto& t = wrt_real ? a : b;
                    const double keep = t[i];
                    t[i] = keep + kStep;
                    const double lp = field_loss(logits ? nn::gan_losses<double>(sig(a), sig(b), mode)
                                                        : nn::gan_losses<double>(a, b, mode));
                    t[i] = keep - kStep;
                    const double lm = field_loss(logits ? nn::gan_losses<double>(sig(a), sig(b), mode)
                                                        : nn::gan_losses<double>(a, b, mode));
                    num[i] = (lp - lm) / (2 * kStep);
                }
                return num;
            };
            auto dl = [](const nn::GanLosses<double>& x) { return x.d_loss; };
            auto gl = [](const nn::GanLosses<double>& x) { return x.g_loss; };
            auto vec = [](const nn::Tensor<double>& t) { return std::vector<double>(t.values().begin(), t.values().end()); };
            double e = 0;
            e = std::max(e, rel_error(vec(g.d_grad_real), grads(dl, true, false)));
            e = std::max(e, rel_error(vec(g.d_grad_fake), grads(dl, false, false)));
            e = std::max(e, rel_error(vec(g.g_grad_fake), grads(gl, false, false)));
            e = std::max(e, rel_error(vec(g.d_grad_real_logits), grads(dl, true, true)));
            e = std::max(e, rel_error(vec(g.d_grad_fake_logits), grads(dl, false, true)));
            e = std::max(e, rel_error(vec(g.g_grad_fake_logits), grads(gl, false, true)));
            note("gan_losses", e);
        }
    }
    const double secs = seconds_since(t0);
    CheckResult res;
    res.pass = secs < 30.0;
    std::string detail;
    double top = 0;
    for (const auto& [name, e] : worst) {
        if (!(e < 1e-4)) {
            res.pass = false;
            detail += name + " FAILED " + fmt("%.2e", e) + "; ";
        }
        top = std::max(top, e);
    }
    res.detail = detail + std::to_string(worst.size()) + " kinds x 3 shapes, worst rel err " + fmt("%.2e", top) +
                 ", " + fmt("%.2f", secs) + " s";
    return res;
}

CheckResult gan_equilibrium() {
    const double target = 2.0 * std::log(2.0);
    nn::Tensor<double> half({16, 1}, 0.5);
    nn::Tensor<float> halff({16, 1}, 0.5f);
    const double e64 = std::abs(nn::gan_losses<double>(half, half).d_loss - target);
    const double e32 = std::abs(nn::gan_losses<float>(halff, halff).d_loss - target);
    CheckResult res;
    res.pass = e64 <= 1e-6 && e32 <= 1e-6;
    res.detail = "|d_loss - 2 ln 2| = " + fmt("%.2e", e64) + " (f64), " + fmt("%.2e", e32) + " (f32)";
    return res;
}

CheckResult shape_contracts() {
    CheckResult res{true, ""};
    for (double f : {2.5e6, 5e6, 10e6}) {
        const std::size_t w = kHighRateWidth / static_cast<std::size_t>(factor_for_rate(f));
        auto g = build_generator(f, 7);
        nn::Tensor<float> x({1, 2, 4, w}, 0.5f);
        const auto& y = g.forward(x);
        const bool ok = g.input_shape() == nn::Shape{2, 4, w} && y.shape() == nn::Shape{1, 2, 4, 320};
        res.pass = res.pass && ok;
        res.detail += "G(" + fmt("%g", f / 1e6) + " MHz): 4x" + std::to_string(w) + "x2 -> " +
                      (y.rank() == 4 ? std::to_string(y.dim(2)) + "x" + std::to_string(y.dim(3)) + "x" +
                                           std::to_string(y.dim(1))
                                     : nn::shape_str(y.shape())) +
                      "; ";
    }
    const LabelEmbedder e(4, 7);
    const auto n = e.label_channel(1, 320).size();
    res.pass = res.pass && n == 1280;
    res.detail += "label FC at width 320 emits " + std::to_string(n) + " values";
    return res;
}

CheckResult snr_calibration(std::uint64_t seed) {
    const auto clean = synth_clean_preamble(kHighRateHz);
    double worst = 0;
    int trials = 0;
    for (double snr : default_snr_grid())
        for (std::uint64_t t = 0; t < 100; ++t) {
            const auto noisy = add_awgn(clean, snr, derive_seed(seed, {static_cast<std::uint64_t>(snr), t}));
            worst = std::max(worst, std::abs(measured_snr_db(clean, noisy) - snr));
            ++trials;
        }
    CheckResult res;
    res.pass = worst <= 0.5;
    res.detail = std::to_string(trials) + " trials over 9..30 dB, worst deviation " + fmt("%.2e", worst) + " dB";
    return res;
}

CheckResult spectrogram_width(std::uint64_t seed) {
    CheckResult res{true, ""};
    const std::size_t m0 = spectro_width(SpectroConfig{});
    res.pass = m0 == 63;
    Rng r(seed);
    int configs = 0;
    double gain = 0;
    bool widths = true;
    while (configs < 20) {
        SpectroConfig c;
        c.window = std::size_t{1} << pick(r, 3, 7);
        c.hop = c.window >> pick(r, 0, 2);
        c.spreading_factor = static_cast<int>(pick(r, 6, 9));
        c.bandwidth_hz = 125e3 * static_cast<double>(1u << pick(r, 0, 2));
        c.f_low_hz = r.uniform(100e3, 2e6);
        std::size_t m = 0;
        try {
            c.validate();
            m = spectro_width(c);
        } catch (const std::exception&) {
            continue;
        }
        if (spectro_span(c) > 20000) continue;
        ++configs;
        std::vector<cplx> x(spectro_span(c));
        for (auto& z : x) z = random_complex(r);
        const ComplexSequence sig(x, c.f_low_hz);
        const auto s = channel_independent_spectrogram(sig, c);
        widths = widths && s.cols == m - 1 && s.rows == c.window && s.all_finite();
        const cplx k = std::polar(r.uniform(0.1, 10.0), r.uniform(-kPi, kPi));
        for (auto& z : x) z *= k;
        const auto s2 = channel_independent_spectrogram(ComplexSequence(x, c.f_low_hz), c);
        for (std::size_t i = 0; i < s.data.size(); ++i) gain = std::max(gain, std::abs(s.data[i] - s2.data[i]));
    }
    res.pass = res.pass && widths && gain < 1e-6;
    res.detail = "M(64,32,7,125k,250k) = " + std::to_string(m0) + "; width M-1 on 20 configs " +
                 (widths ? "ok" : "VIOLATED") + "; gain invariance " + fmt("%.2e", gain);
    return res;
}

// --- desk-scale experiment ---------------------------------------------------

const EvalReport* DeskOutcome::find(Method m, double f) const {
    for (const auto& r : reports)
        if (r.method == m && (m == Method::FullRate || std::abs(r.f_low_hz - f) < 1.0)) return &r;
    return nullptr;
}

CheckResult DeskOutcome::full_rate_high_snr() const {
    const auto* fr = find(Method::FullRate, 0);
    if (!fr) return {false, "no full_rate report"};
    CheckResult res{true, "full_rate"};
    for (double s : fr->snr_grid)
        if (s >= 21.0 - 1e-9) {
            const auto a = fr->average(s);
            res.pass = res.pass && a && *a > 90.0;
            res.detail += " " + fmt("%g", s) + "dB:" + (a ? fmt("%.1f", *a) : std::string("NA"));
        }
    return res;
}

CheckResult DeskOutcome::cgan_vs_cnn_only() const {
    const auto* g = find(Method::Cgan, 5e6);
    const auto* c = find(Method::CnnOnly, 5e6);
    if (!g || !c) return {false, "missing 5 MHz reports"};
    const double a = g->mean_over_snr().value_or(-1), b = c->mean_over_snr().value_or(101);
    return {a >= b, "cgan " + fmt("%.1f", a) + " vs cnn_only " + fmt("%.1f", b)};
}

CheckResult DeskOutcome::csi_vs_lai() const {
    CheckResult res{true, ""};
    for (double f : {2.5e6, 5e6}) {
        const auto* c = find(Method::Csi, f);
        const auto* l = find(Method::Lai, f);
        if (!c || !l) return {false, "missing lai/csi reports"};
        const double a = c->mean_over_snr().value_or(-1), b = l->mean_over_snr().value_or(101);
        res.pass = res.pass && a >= b;
        res.detail += fmt("%g", f / 1e6) + " MHz csi " + fmt("%.1f", a) + " vs lai " + fmt("%.1f", b) + "; ";
    }
    return res;
}

CheckResult DeskOutcome::full_rate_vs_cgan() const {
    const auto* fr = find(Method::FullRate, 0);
    if (!fr) return {false, "no full_rate report"};
    CheckResult res{true, ""};
    int gans = 0, cells = 0;
    for (const auto& g : reports) {
        if (g.method != Method::Cgan) continue;
        ++gans;
        for (double s : fr->snr_grid) {
            const auto a = fr->average(s), b = g.average(s);
            ++cells;
            if (!a || !b || *a < *b) {
                res.pass = false;
                res.detail += fmt("%g", g.f_low_hz / 1e6) + " MHz at " + fmt("%g", s) + " dB; ";
            }
        }
    }
    if (gans == 0) return {false, "no cgan report"};
    res.detail = (res.pass ? "holds in " : "violated: " + res.detail + "of ") + std::to_string(cells) + " cells";
    return res;
}

DeskOutcome run_desk(std::uint64_t seed, bool all_rates, const std::function<void(const std::string&)>& progress) {
    auto cfg = desk_preset(seed);
    if (!all_rates) {
        cfg.f_lows = {2.5e6, 5e6};
        cfg.dataset.low_rate_factors = {8, 4};
        cfg.validate();
    }
    const auto t0 = Clock::now();
    auto res = run_pipeline(cfg, progress);
    DeskOutcome out;
    out.seed = seed;
    out.reports = std::move(res.reports);
    out.csvs = std::move(res.report_csvs);
    out.csvs["plotdata.csv"] = res.plotdata;
    out.seconds = seconds_since(t0);
    return out;
}

}  // namespace seilab::checks
