#include <doctest.h>

#include <filesystem>

#include "checks.hpp"
#include "seilab/cgan/cgan.hpp"
#include "seilab/signal/dataset.hpp"

using namespace seilab;

namespace {

struct Toy {
    Dataset data;
    CganConfig cfg;
};

Toy toy() {
    DatasetManifest m;
    m.fleet = default_fleet();
    m.fleet.resize(2);
    m.per_emitter_count = 10;
    m.train_count_per_realization = 8;
    m.realizations = 1;
    m.snr_grid = {21};
    m.seed = 5;
    m.low_rate_factors = {4};
    Toy t{build_dataset_in_memory(m), {}};
    t.cfg.f_low_hz = 5e6;
    t.cfg.minibatch = 4;
    t.cfg.epochs = 5;
    t.cfg.max_batches_per_epoch = 2;
    t.cfg.equilibrium_eps = 1e-9;
    t.cfg.seed = 17;
    t.cfg.num_labels = 2;
    return t;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("seilab_test_cgan_" + name);
}

}  // namespace

TEST_CASE("generator maps [2, 4, W] to [2, 4, 320] at every supported rate") {
    for (double f : {2.5e6, 5e6, 10e6}) {
        auto g = build_generator(f, 1);
        const std::size_t w = 320 / std::size_t(factor_for_rate(f));
        CHECK(g.input_shape() == nn::Shape{2, 4, w});
        CHECK(g.output_shape() == nn::Shape{2, 4, 320});
        const auto shapes = g.layer_output_shapes();
        const std::size_t code = nn::shape_size(shapes[generator_bottleneck_layer(f)]);
        for (const auto& s : shapes) CHECK(nn::shape_size(s) >= code);
        CHECK(code < nn::shape_size(g.input_shape()));
    }
    CHECK_THROWS(build_generator(4e6, 1));
    CHECK(factor_for_rate(2.5e6) == 8);
    CHECK(checks::shape_contracts().pass);
}

TEST_CASE("discriminator sees the label channel and emits one probability per example") {
    auto d = build_discriminator(2);
    CHECK(d.input_shape() == nn::Shape{2, 4, 320});
    CHECK(d.output_shape() == nn::Shape{1});
    CHECK(d.specs().back().kind == nn::LayerKind::Sigmoid);
    CHECK(build_discriminator(3).parameter_count() == d.parameter_count());
    CHECK_THROWS(d.forward(nn::Tensor<float>({1, 1, 4, 320})));
    const auto p = d.forward(nn::Tensor<float>({3, 2, 4, 320}, 0.5f));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p[i] > 0.0f);
        CHECK(p[i] < 1.0f);
    }
}

TEST_CASE("interrupted and resumed training equals an uninterrupted run") {
    auto t = toy();
    const auto& high = t.data.train_high;
    const auto& low = t.data.train_low.at(4);
    auto whole = train_cgan(high, low, t.cfg);
    CHECK(whole.completed);
    CHECK(whole.log.size() == 5);

    const auto state = temp_path("state");
    std::filesystem::remove(state);
    CganRunOptions opts;
    opts.state_file = state;
    opts.interrupt_after = 2;
    auto first = train_cgan(high, low, t.cfg, opts);
    CHECK_FALSE(first.completed);
    CHECK(first.log.size() == 2);
    REQUIRE(std::filesystem::exists(state));
    opts.interrupt_after = 0;
    auto rest = train_cgan(high, low, t.cfg, opts);
    CHECK(rest.completed);
    REQUIRE(rest.log.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rest.log[i].d_loss == whole.log[i].d_loss);
        CHECK(rest.log[i].g_loss == whole.log[i].g_loss);
    }
    auto a = whole.generator.network().parameters();
    auto b = rest.generator.network().parameters();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value == b[i]->value);
    std::filesystem::remove(state);
}

TEST_CASE("a loose equilibrium threshold stops training early") {
    auto t = toy();
    t.cfg.equilibrium_eps = 1.0;
    auto r = train_cgan(t.data.train_high, t.data.train_low.at(4), t.cfg);
    REQUIRE(!r.log.empty());
    CHECK(r.log.size() <= std::size_t(t.cfg.epochs));
    CHECK(r.log.back().equilibrium);
    CHECK(r.log.size() == 1);
}

TEST_CASE("trained generator upsamples, saves and loads with its tag") {
    auto t = toy();
    t.cfg.epochs = 1;
    auto r = train_cgan(t.data.train_high, t.data.train_low.at(4), t.cfg);
    const auto& rec = t.data.train_low.at(4).front();
    const auto up = r.generator.upsample(rec.sequence, rec.emitter_id);
    CHECK(up.width == 320);
    CHECK(up.channels == 1);

    const auto path = temp_path("g.seig");
    r.generator.save(path, "abc123");
    CHECK(TrainedGenerator::stored_tag(path) == "abc123");
    auto back = TrainedGenerator::load(path);
    CHECK(back.f_low_hz() == 5e6);
    CHECK(back.embedder() == r.generator.embedder());
    CHECK(back.upsample(rec.sequence, rec.emitter_id) == up);
    std::filesystem::remove(path);
}

TEST_CASE("configuration validation") {
    auto t = toy();
    t.cfg.minibatch = 0;
    CHECK_THROWS_AS(t.cfg.validate(16), ConfigError);
    t = toy();
    t.cfg.minibatch = 17;
    CHECK_THROWS_AS(t.cfg.validate(16), ConfigError);
    t = toy();
    CHECK_NOTHROW(t.cfg.validate(16));
}

TEST_CASE("log rows carry every field") {
    EpochLog row;
    row.epoch = 3;
    row.d_loss = 1.5;
    row.equilibrium = true;
    CHECK(training_log_header() == "epoch,d_loss,g_loss,mean_d_real,mean_d_fake,equilibrium");
    const auto s = training_log_row(row);
    CHECK(s.rfind("3,", 0) == 0);
    CHECK(s.back() == '1');
}

TEST_CASE("training rejects misaligned high/low pairs") {
    auto t = toy();
    auto low = t.data.train_low.at(4);
    std::swap(low[0], low[1]);
    CHECK_THROWS(train_cgan(t.data.train_high, low, t.cfg));
    low = t.data.train_low.at(4);
    low.pop_back();
    CHECK_THROWS(train_cgan(t.data.train_high, low, t.cfg));
}

TEST_CASE("toy adversarial run: D(real) settles near one half and the true label conditions best") {
    DatasetManifest m;
    m.fleet = default_fleet();
    m.fleet.resize(2);
    m.per_emitter_count = 40;
    m.train_count_per_realization = 32;
    m.realizations = 1;
    m.snr_grid = {30};
    m.seed = 21;
    m.low_rate_factors = {4};
    const auto data = build_dataset_in_memory(m);
    CganConfig cfg;
    cfg.f_low_hz = 5e6;
    cfg.minibatch = 16;
    cfg.epochs = 30;
    cfg.seed = 4;
    cfg.num_labels = 2;
    auto r = train_cgan(data.train_high, data.train_low.at(4), cfg);
    REQUIRE(r.log.size() >= 2);
    MESSAGE("epoch 1 D(real) " << r.log.front().mean_d_real << ", final " << r.log.back().mean_d_real);
    CHECK(r.log.back().mean_d_real >= 0.35);
    CHECK(r.log.back().mean_d_real <= 0.65);

    const auto& low = data.train_low.at(4);
    double right = 0, wrong = 0;
    for (std::size_t i = 0; i < low.size(); ++i) {
        const auto truth = to_tensor(data.train_high[i]);
        const int y = low[i].emitter_id;
        const auto a = r.generator.upsample(low[i].sequence, y);
        const auto b = r.generator.upsample(low[i].sequence, 3 - y);
        for (std::size_t k = 0; k < truth.data.size(); ++k) {
            right += std::abs(a.data[k] - truth.data[k]);
            wrong += std::abs(b.data[k] - truth.data[k]);
        }
    }
    MESSAGE("mean distance, true label " << right / double(low.size() * 1280) << ", wrong label "
                                         << wrong / double(low.size() * 1280));
    CHECK(right < wrong);
}

TEST_CASE("upsampling checks the input rate and depends on the label") {
    auto t = toy();
    t.cfg.epochs = 1;
    auto r = train_cgan(t.data.train_high, t.data.train_low.at(4), t.cfg);
    const auto& rec = t.data.train_low.at(4).front();
    CHECK(r.generator.upsample(rec.sequence, 1).data != r.generator.upsample(rec.sequence, 2).data);
    CHECK_THROWS(r.generator.upsample(t.data.train_high.front().sequence, 1));
    CHECK_THROWS(r.generator.upsample(rec.sequence, 3));
}
