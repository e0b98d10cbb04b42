#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "checks.hpp"
#include "gen.hpp"
#include "seilab/nn/checkpoint.hpp"
#include "seilab/nn/loss.hpp"
#include "seilab/nn/network.hpp"
#include "seilab/nn/optim.hpp"

using namespace seilab;
using namespace seilab::nn;
using testgen::for_all;
using testgen::Gen;

namespace {

Tensor<double> random_tensor(Gen& g, Shape s) {
    Tensor<double> t(std::move(s));
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = g.real(-1, 1);
    return t;
}

}  // namespace

TEST_CASE("property: conv2d matches a direct cross-correlation with zero padding") {
    for_all(10, 1, [](Gen& g) {
        const std::size_t cin = g.size(1, 3), cout = g.size(1, 4), h = g.size(2, 6), w = g.size(3, 9);
        const std::uint32_t kh = std::uint32_t(2 * g.size(0, 1) + 1), kw = std::uint32_t(2 * g.size(0, 2) + 1);
        Network<double> net({cin, h, w}, {LayerSpec::conv2d(std::uint32_t(cout), kh, kw)}, g.size(0, 1u << 30));
        auto ps = net.parameters();
        for (std::size_t i = 0; i < ps[1]->value.size(); ++i) ps[1]->value[i] = g.real(-1, 1);
        const auto& wt = ps[0]->value;
        const auto& bias = ps[1]->value;
        const std::size_t n = 2;
        const auto x = random_tensor(g, {n, cin, h, w});
        const auto y = net.forward(x);
        REQUIRE(y.shape() == Shape{n, cout, h, w});
        const long ph = kh / 2, pw = kw / 2;
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t o = 0; o < cout; ++o)
                for (std::size_t i = 0; i < h; ++i)
                    for (std::size_t j = 0; j < w; ++j) {
                        double acc = bias[o];
                        for (std::size_t c = 0; c < cin; ++c)
                            for (std::size_t u = 0; u < kh; ++u)
                                for (std::size_t v = 0; v < kw; ++v) {
                                    const long r = long(i) + long(u) - ph, q = long(j) + long(v) - pw;
                                    if (r < 0 || q < 0 || r >= long(h) || q >= long(w)) continue;
                                    acc += wt[((o * cin + c) * kh + u) * kw + v] *
                                           x[((b * cin + c) * h + std::size_t(r)) * w + std::size_t(q)];
                                }
                        CHECK(y[((b * cout + o) * h + i) * w + j] == doctest::Approx(acc).epsilon(1e-12));
                    }
    });
}

TEST_CASE("dense computes W x + b") {
    Network<double> net({3}, {LayerSpec::dense(2)}, 5);
    auto ps = net.parameters();
    const double wv[] = {1, 2, 3, -1, 0, 0.5};
    for (std::size_t i = 0; i < 6; ++i) ps[0]->value[i] = wv[i];
    ps[1]->value[0] = 0.25;
    ps[1]->value[1] = -2;
    const Tensor<double> x({1, 3}, std::vector<double>{1, -1, 2});
    const auto y = net.forward(x);
    CHECK(y[0] == doctest::Approx(1 - 2 + 6 + 0.25));
    CHECK(y[1] == doctest::Approx(-1 + 1 - 2));
}

TEST_CASE("maxpool picks window maxima and routes the gradient to them") {
    Network<double> net({1, 2, 4}, {LayerSpec::maxpool2d(2, 2)}, 1);
    const Tensor<double> x({1, 1, 2, 4}, std::vector<double>{1, 5, -2, 0, 3, 2, -1, -3});
    const auto y = net.forward(x);
    REQUIRE(y.shape() == Shape{1, 1, 1, 2});
    CHECK(y[0] == 5);
    CHECK(y[1] == 0);
    const auto dx = net.backward(Tensor<double>({1, 1, 1, 2}, std::vector<double>{7, 9}));
    const std::vector<double> want{0, 7, 0, 9, 0, 0, 0, 0};
    for (std::size_t i = 0; i < 8; ++i) CHECK(dx[i] == want[i]);
}

TEST_CASE("upsample repeats values and sums gradients over each block") {
    Network<double> net({1, 1, 2}, {LayerSpec::upsample2d(2, 3)}, 1);
    const auto y = net.forward(Tensor<double>({1, 1, 1, 2}, std::vector<double>{4, -1}));
    REQUIRE(y.shape() == Shape{1, 1, 2, 6});
    const std::vector<double> want{4, 4, 4, -1, -1, -1, 4, 4, 4, -1, -1, -1};
    for (std::size_t i = 0; i < 12; ++i) CHECK(y[i] == want[i]);
    Tensor<double> dy(y.shape(), 1.0);
    const auto dx = net.backward(dy);
    CHECK(dx[0] == 6);
    CHECK(dx[1] == 6);
}

TEST_CASE("softmax normalizes over the whole example") {
    Network<double> net({2, 2}, {LayerSpec::softmax()}, 1);
    const auto y = net.forward(Tensor<double>({1, 2, 2}, std::vector<double>{0, std::log(2.0), std::log(3.0), std::log(4.0)}));
    for (std::size_t i = 0; i < 4; ++i) CHECK(y[i] == doctest::Approx(double(i + 1) / 10.0));
}

TEST_CASE("embedding looks up 0-based rows") {
    Network<double> net({1}, {LayerSpec::embedding(3, 2)}, 1);
    auto ps = net.parameters();
    for (std::size_t i = 0; i < 6; ++i) ps[0]->value[i] = double(i);
    const auto y = net.forward(Tensor<double>({2, 1}, std::vector<double>{2, 0}));
    CHECK(y[0] == 4);
    CHECK(y[1] == 5);
    CHECK(y[2] == 0);
    CHECK(y[3] == 1);
    CHECK_THROWS(net.forward(Tensor<double>({1, 1}, std::vector<double>{3})));
}

TEST_CASE("shape inference rejects inconsistent layers") {
    CHECK_THROWS(Network<float>({1, 1, 3}, {LayerSpec::maxpool2d(2, 2)}, 1));
    CHECK_THROWS(Network<float>({4, 4}, {LayerSpec::conv2d(2, 3, 3)}, 1));
    CHECK(Network<float>({1, 4, 5}, {LayerSpec::maxpool2d(2, 2)}, 1).output_shape() == Shape{1, 2, 2});
    CHECK_THROWS(Network<float>({2}, {LayerSpec::embedding(3, 2)}, 1));
}

TEST_CASE("backward gradients agree with finite differences for every layer kind and both losses") {
    const auto r = checks::gradient_suite(11);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("cross entropy value and logit gradient") {
    const Tensor<double> p({2, 3}, std::vector<double>{0.2, 0.5, 0.3, 0.1, 0.1, 0.8});
    const int labels[] = {1, 2};
    const auto ce = categorical_cross_entropy(p, labels);
    CHECK(ce.loss == doctest::Approx(-(std::log(0.5) + std::log(0.8)) / 2));
    CHECK(ce.grad_logits[1] == doctest::Approx((0.5 - 1) / 2));
    CHECK(ce.grad_logits[0] == doctest::Approx(0.2 / 2));
    CHECK(ce.grad_probs[1] == doctest::Approx(-1 / (2 * 0.5)));
    CHECK(ce.grad_probs[0] == 0.0);
    const int bad[] = {1, 3};
    CHECK_THROWS(categorical_cross_entropy(p, bad));
}

TEST_CASE("GAN losses at equilibrium and at a hand-picked point") {
    const Tensor<double> half({4, 1}, 0.5);
    const auto eq = gan_losses(half, half);
    CHECK(eq.d_loss == doctest::Approx(2 * std::numbers::ln2).epsilon(1e-12));
    CHECK(eq.g_loss == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
    const auto mm = gan_losses(half, half, GeneratorLoss::Minimax);
    CHECK(mm.g_loss == doctest::Approx(-std::numbers::ln2).epsilon(1e-12));

    const Tensor<double> real({1, 1}, 0.9), fake({1, 1}, 0.2);
    const auto l = gan_losses(real, fake);
    CHECK(l.d_loss == doctest::Approx(-std::log(0.9) - std::log(0.8)));
    CHECK(l.g_loss == doctest::Approx(-std::log(0.2)));
    CHECK(l.d_grad_real[0] == doctest::Approx(-1 / 0.9));
    CHECK(l.d_grad_fake[0] == doctest::Approx(1 / 0.8));
    CHECK(l.d_grad_real_logits[0] == doctest::Approx(0.9 - 1));
    CHECK(l.d_grad_fake_logits[0] == doctest::Approx(0.2));
    CHECK(l.g_grad_fake_logits[0] == doctest::Approx(0.2 - 1));
    CHECK(checks::gan_equilibrium().pass);
}

TEST_CASE("first Adam step moves every weight by about lr against the gradient sign") {
    Network<double> net({3}, {LayerSpec::dense(2)}, 3);
    auto ps = net.parameters();
    const auto before = ps[0]->value;
    Gen g(4);
    for (std::size_t i = 0; i < ps[0]->grad.size(); ++i) ps[0]->grad[i] = g.real(-2, 2);
    for (std::size_t i = 0; i < ps[1]->grad.size(); ++i) ps[1]->grad[i] = g.real(-2, 2);
    const auto grad = ps[0]->grad;
    AdamConfig cfg;
    cfg.lr = 0.01;
    AdamState<double> st(cfg, ps);
    adam_step(st, ps);
    CHECK(st.step == 1);
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double moved = ps[0]->value[i] - before[i];
        const double want = -cfg.lr * grad[i] / (std::abs(grad[i]) + cfg.epsilon);
        CHECK(moved == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("momentum SGD follows v <- mu v - lr g") {
    Network<double> net({1}, {LayerSpec::dense(1)}, 3);
    auto ps = net.parameters();
    ps[0]->value[0] = 1.0;
    ps[1]->value[0] = 0.0;
    MomentumSgdState<double> st(0.1, 0.5, ps);
    ps[0]->grad[0] = 2.0;
    ps[1]->grad[0] = 0.0;
    st.step(ps);
    CHECK(ps[0]->value[0] == doctest::Approx(0.8));
    st.step(ps);
    CHECK(ps[0]->value[0] == doctest::Approx(0.8 - 0.1 - 0.2));
}

TEST_CASE("network checkpoints round-trip bit-exactly") {
    Network<float> net({1, 4, 8},
                       {LayerSpec::conv2d(3, 3, 3), LayerSpec::relu(), LayerSpec::maxpool2d(2, 2), LayerSpec::flatten(),
                        LayerSpec::dense(5), LayerSpec::softmax()},
                       42);
    std::stringstream buf;
    write_network(buf, net);
    write_network(buf, net);
    auto a = read_network(buf);
    auto b = read_network(buf);
    CHECK(a.specs() == net.specs());
    CHECK(a.seed() == 42);
    auto pa = a.parameters(), pn = net.parameters(), pb = b.parameters();
    REQUIRE(pa.size() == pn.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i]->value == pn[i]->value);
        CHECK(pb[i]->value == pn[i]->value);
    }
    std::stringstream bad("SEIX");
    CHECK_THROWS(read_network(bad));
}

TEST_CASE("checked mode reports the layer that produced a non-finite value") {
    Network<double> net({2}, {LayerSpec::dense(2), LayerSpec::sigmoid()}, 1);
    net.set_checked(true);
    net.parameters()[0]->value[0] = INFINITY;
    CHECK_THROWS_AS(net.forward(Tensor<double>({1, 2}, 1.0)), NumericError);
}

TEST_CASE("same seed gives identical initialization, different seeds differ") {
    const std::vector<LayerSpec> specs{LayerSpec::dense(4), LayerSpec::relu(), LayerSpec::dense(2)};
    Network<float> a({3}, specs, 9), b({3}, specs, 9), c({3}, specs, 10);
    CHECK(a.parameters()[0]->value == b.parameters()[0]->value);
    CHECK_FALSE(a.parameters()[0]->value == c.parameters()[0]->value);
    CHECK(a.parameter_count() == 3 * 4 + 4 + 4 * 2 + 2);
}

TEST_CASE("a Dirac kernel with zero bias is the identity") {
    Network<double> net({2, 3, 5}, {LayerSpec::conv2d(2, 3, 3)}, 1);
    auto ps = net.parameters();
    ps[0]->value.fill(0.0);
    ps[1]->value.fill(0.0);
    for (std::size_t c = 0; c < 2; ++c) ps[0]->value[((c * 2 + c) * 3 + 1) * 3 + 1] = 1.0;
    Gen g(12);
    const auto x = random_tensor(g, {2, 2, 3, 5});
    CHECK(net.forward(x) == x);
}

TEST_CASE("small forward examples") {
    Network<double> sm({4}, {LayerSpec::softmax()}, 1);
    const auto p = sm.forward(Tensor<double>({1, 4}, 0.7));
    for (std::size_t i = 0; i < 4; ++i) CHECK(p[i] == doctest::Approx(0.25).epsilon(1e-15));
    Network<double> mp({1, 2, 2}, {LayerSpec::maxpool2d(2, 2)}, 1);
    CHECK(mp.forward(Tensor<double>({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4}))[0] == 4);
}

TEST_CASE("property: softmax rows sum to one") {
    for_all(20, 13, [](Gen& g) {
        const std::size_t n = g.size(1, 5), d = g.size(1, 12);
        Network<float> net({d}, {LayerSpec::softmax()}, 1);
        Tensor<float> x({n, d});
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = float(g.real(-30, 30));
        const auto y = net.forward(x);
        for (std::size_t b = 0; b < n; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < d; ++i) s += y[b * d + i];
            CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
        }
    });
}

TEST_CASE("dense weight gradient is the outer product of delta and x") {
    Network<double> net({3}, {LayerSpec::dense(2)}, 6);
    const Tensor<double> x({1, 3}, std::vector<double>{0.5, -2, 3});
    const Tensor<double> delta({1, 2}, std::vector<double>{1.5, -0.25});
    net.zero_grad();
    net.forward(x);
    const auto dx = net.backward(delta);
    auto ps = net.parameters();
    for (std::size_t o = 0; o < 2; ++o) {
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(ps[0]->grad[o * 3 + i] - delta[o] * x[i]) < 1e-12);
        CHECK(std::abs(ps[1]->grad[o] - delta[o]) < 1e-12);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        const double want = ps[0]->value[i] * delta[0] + ps[0]->value[3 + i] * delta[1];
        CHECK(std::abs(dx[i] - want) < 1e-12);
    }
}

TEST_CASE("zero upstream gradient leaves every parameter gradient at zero") {
    Network<double> net({1, 4, 8},
                        {LayerSpec::conv2d(3, 1, 3), LayerSpec::relu(), LayerSpec::maxpool2d(1, 2), LayerSpec::flatten(),
                         LayerSpec::dense(4), LayerSpec::sigmoid()},
                        2);
    Gen g(14);
    net.zero_grad();
    const auto y = net.forward(random_tensor(g, {3, 1, 4, 8}));
    net.backward(Tensor<double>(y.shape(), 0.0));
    for (auto* p : net.parameters())
        for (std::size_t i = 0; i < p->grad.size(); ++i) CHECK(p->grad[i] == 0.0);
}

TEST_CASE("misuse is rejected: backward before forward, wrong input shape") {
    Network<double> net({3}, {LayerSpec::dense(2)}, 1);
    CHECK_THROWS(net.backward(Tensor<double>({1, 2})));
    try {
        net.forward(Tensor<double>({1, 4}));
        FAIL("expected a shape error");
    } catch (const std::exception& e) {
        const std::string msg = e.what();
        CHECK(msg.find("[3]") != std::string::npos);
        CHECK(msg.find("[1x4]") != std::string::npos);
    }
}

TEST_CASE("loss corner values") {
    const Tensor<double> onehot({1, 4}, std::vector<double>{0, 0, 1, 0});
    const int two[] = {2};
    CHECK(categorical_cross_entropy(onehot, two).loss == doctest::Approx(0.0).epsilon(1e-6));
    const Tensor<double> uniform({1, 4}, 0.25);
    CHECK(categorical_cross_entropy(uniform, two).loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    const auto perfect = gan_losses(Tensor<double>({2, 1}, 1.0), Tensor<double>({2, 1}, 0.0));
    CHECK(perfect.d_loss == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("optimizer oracles on a scalar parabola") {
    Network<double> net({1}, {LayerSpec::dense(1)}, 1);
    auto ps = net.parameters();
    std::vector<Parameter<double>*> w{ps[0]};

    ps[0]->value[0] = 0.4;
    ps[0]->grad[0] = 0.0;
    AdamState<double> still({}, w);
    adam_step(still, w);
    CHECK(ps[0]->value[0] == 0.4);

    ps[0]->value[0] = 0.0;
    AdamConfig cfg;
    cfg.lr = 0.1;
    AdamState<double> st(cfg, w);
    for (int i = 0; i < 100; ++i) {
        ps[0]->grad[0] = 2 * (ps[0]->value[0] - 3);
        adam_step(st, w);
    }
    CHECK(std::abs(ps[0]->value[0] - 3) < 0.05);

    Tensor<double>* vals[] = {&ps[0]->value};
    const Tensor<double>* grads[] = {&ps[0]->grad};
    ps[0]->value[0] = 1;
    ps[0]->grad[0] = 2;
    sgd_step<double>(vals, grads, 0.0);
    CHECK(ps[0]->value[0] == 1);
    sgd_step<double>(vals, grads, 0.5);
    CHECK(ps[0]->value[0] == 0);

    ps[0]->value[0] = 0.0;
    for (int i = 0; i < 100; ++i) {
        ps[0]->grad[0] = 2 * (ps[0]->value[0] - 3);
        sgd_step<double>(vals, grads, 0.1);
    }
    CHECK(std::abs(ps[0]->value[0] - 3) < 1e-6);

    Tensor<double> wrong({2});
    const Tensor<double>* bad[] = {&wrong};
    CHECK_THROWS(sgd_step<double>(vals, bad, 0.1));
}
