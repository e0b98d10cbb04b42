#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "seilab/tensorize/label_embedder.hpp"
#include "seilab/tensorize/preamble_tensor.hpp"

using namespace seilab;
using testgen::for_all;
using testgen::Gen;

TEST_CASE("hand-computed normalized column") {
    const ComplexSequence s(std::vector<cplx>{{2.0, 1.0}}, 20e6);
    const auto t = to_tensor(s);
    const double vals[4] = {2.0, 1.0, 0.5 * std::log(5.0), std::atan2(1.0, 2.0)};
    const double lo = vals[3], hi = vals[0];
    for (std::size_t r = 0; r < 4; ++r) CHECK(t.at(0, r, 0) == doctest::Approx((vals[r] - lo) / (hi - lo)).epsilon(1e-12));
    CHECK(t.at(0, 0, 0) == 1.0);
    CHECK(t.at(0, 3, 0) == 0.0);
}

TEST_CASE("raw rows reconstruct z and its complex logarithm") {
    for_all(20, 1, [](Gen& g) {
        const auto s = g.signal(g.size(1, 64));
        const auto t = raw_tensor(s);
        REQUIRE(t.width == s.size());
        for (std::size_t w = 0; w < s.size(); ++w) {
            const cplx z(t.at(0, 0, w), t.at(0, 1, w));
            CHECK(std::abs(z - s[w]) < 1e-15);
            CHECK(std::abs(t.at(0, 2, w) - std::log(std::abs(z))) < 1e-9);
            CHECK(std::abs(t.at(0, 3, w) - std::arg(z)) < 1e-9);
        }
    });
}

TEST_CASE("magnitude floor keeps zero samples finite") {
    const auto t = raw_tensor(ComplexSequence(std::vector<cplx>(4), 20e6));
    CHECK(t.at(0, 2, 0) == doctest::Approx(std::log(kMagnitudeFloor)));
    const auto n = to_tensor(ComplexSequence(std::vector<cplx>(4), 20e6));
    CHECK(n.at(0, 0, 0) == 1.0);
    CHECK(n.at(0, 2, 0) == 0.0);
}

TEST_CASE("property: every normalized column spans exactly [0, 1] and normalizing is idempotent") {
    for_all(30, 2, [](Gen& g) {
        auto t = to_tensor(g.signal(g.size(1, 320)));
        for (std::size_t w = 0; w < t.width; ++w) {
            double lo = 2, hi = -1;
            for (std::size_t r = 0; r < 4; ++r) {
                lo = std::min(lo, t.at(0, r, w));
                hi = std::max(hi, t.at(0, r, w));
            }
            CHECK(lo == 0.0);
            CHECK((hi == 1.0 || hi == 0.0));
        }
        auto again = t;
        normalize_columns(again);
        CHECK(again == t);
    });
}

TEST_CASE("non-finite samples are rejected") {
    std::vector<cplx> v(4, cplx(1, 1));
    v[1] = cplx(0, INFINITY);
    CHECK_THROWS(to_tensor(ComplexSequence(v, 20e6)));
}

TEST_CASE("label embedder: sizes, distinct labels, determinism") {
    const LabelEmbedder e(4, 9);
    CHECK(e.embedding(1).size() == kEmbeddingDim);
    CHECK(e.label_channel(1, 320).size() == 1280);
    CHECK(e.label_channel(2, 40).size() == 160);
    CHECK(e.label_channel(1, 320) != e.label_channel(2, 320));
    CHECK(LabelEmbedder(4, 9) == e);
    CHECK_FALSE(LabelEmbedder(4, 10) == e);
    CHECK_THROWS(e.embedding(0));
    CHECK_THROWS(e.embedding(5));
    CHECK_THROWS(e.label_channel(1, 100));
    CHECK(is_supported_width(80));
    CHECK_FALSE(is_supported_width(81));
}

TEST_CASE("label channel is finite at every supported width") {
    const LabelEmbedder e(3, 4);
    for (std::size_t w : kSupportedWidths)
        for (int label = 1; label <= 3; ++label) {
            const auto a = e.label_channel(label, w);
            CHECK(a.size() == 4 * w);
            for (double v : a) CHECK(std::isfinite(v));
        }
}

TEST_CASE("attach and strip the label channel") {
    Gen g(3);
    for (std::size_t w : {80u, 320u}) {
        const auto t = to_tensor(g.signal(w));
        const LabelEmbedder e(4, 1);
        const auto m = e.label_channel(3, w);
        const auto c = attach_label(t, m);
        CHECK(c.channels == 2);
        CHECK(c.width == w);
        for (std::size_t i = 0; i < 4 * w; ++i) {
            CHECK(c.channel(0)[i] == t.channel(0)[i]);
            CHECK(c.channel(1)[i] == m[i]);
        }
        CHECK(strip_label(c) == t);
        CHECK_THROWS(attach_label(t, std::vector<double>(4 * w + 4)));
        CHECK_THROWS(attach_label(c, m));
    }
}

TEST_CASE("batches are [N, C, 4, W] and round-trip through from_batch") {
    Gen g(4);
    std::vector<PreambleTensor> ts;
    for (int i = 0; i < 3; ++i) ts.push_back(to_tensor(g.signal(40), i + 1));
    const auto b = make_batch(ts);
    CHECK(b.shape() == nn::Shape{3, 1, 4, 40});
    const std::size_t idx[] = {2, 0};
    const auto s = make_batch(ts, idx);
    CHECK(s.shape() == nn::Shape{2, 1, 4, 40});
    const auto back = from_batch(s, 0);
    for (std::size_t i = 0; i < 160; ++i) CHECK(back.data[i] == doctest::Approx(ts[2].data[i]).epsilon(1e-6));
    ts.push_back(to_tensor(g.signal(80)));
    CHECK_THROWS(make_batch(ts));
}
