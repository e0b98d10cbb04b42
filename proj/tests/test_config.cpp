#include <doctest.h>

#include "seilab/common.hpp"
#include "seilab/config/experiment_config.hpp"
#include "seilab/config/kv_config.hpp"

using namespace seilab;

namespace {

std::string message_of(const std::string& text) {
    try {
        experiment_from_kv(KvConfig::parse(text, "t.cfg"));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("key/value parsing with sections, comments and typed lookups") {
    const auto kv = KvConfig::parse("top = 1\n# c\n[a]\nx = 2.5 ; trailing\nlist = 1, 2,3\nflag = true\n");
    CHECK(kv.get_int("", "top", 0) == 1);
    CHECK(kv.get_double("a", "x", 0) == 2.5);
    CHECK(kv.get_doubles("a", "list", {}) == std::vector<double>{1, 2, 3});
    CHECK(kv.get_bool("a", "flag", false));
    CHECK(kv.get_int("a", "missing", 7) == 7);
}

TEST_CASE("errors name the source line and the field") {
    const auto msg = message_of("[experiment]\nseed = 1\n[dataset]\nemitters = four\n");
    CHECK(msg.find("t.cfg:4") != std::string::npos);
    CHECK(msg.find("emitters") != std::string::npos);

    const auto missing = message_of("[dataset]\nemitters = 2\n");
    CHECK(missing.find("seed") != std::string::npos);

    const auto unknown = message_of("[experiment]\nseed = 1\n[dataset]\nemiters = 2\n");
    CHECK(unknown.find("emiters") != std::string::npos);

    const auto bad_map = message_of("[experiment]\nseed = 1\n[classifier]\nsnr_map = 9-9\n");
    CHECK(bad_map.find("snr_map") != std::string::npos);
}

TEST_CASE("cross-field validation") {
    CHECK_FALSE(message_of("[experiment]\nseed = 1\n[dataset]\nper_emitter_count = 10\ntrain_count = 12\n").empty());
    CHECK_FALSE(message_of("[experiment]\nseed = 1\n[evaluation]\nf_low_mhz = 4\n").empty());
    CHECK(message_of("[experiment]\nseed = 1\n").empty());
}

TEST_CASE("shipped configs: desk matches the preset, full parses") {
    const std::string dir = SEILAB_SOURCE_DIR "/configs/";
    const auto desk = load_experiment(dir + "desk.cfg");
    CHECK(desk.canonical_text() == desk_preset(1).canonical_text());
    CHECK(desk.hash() == desk_preset(1).hash());
    const auto full = load_experiment(dir + "full.cfg");
    CHECK(full.dataset.per_emitter_count == 2000);
    CHECK(full.dataset.realizations == 10);
    CHECK(full.cgan.minibatch == 256);
    CHECK(full.cgan.epochs == 1000);
    CHECK(full.f_lows == std::vector<double>{2.5e6, 5e6, 10e6});
}

TEST_CASE("hash is a stable function of every field") {
    const auto a = desk_preset(1), b = desk_preset(1), c = desk_preset(2);
    CHECK(a.hash() == b.hash());
    CHECK(a.hash() != c.hash());
    CHECK(a.hash().size() == 16);
    auto d = desk_preset(1);
    d.cgan.epochs = 99;
    CHECK(d.hash() != a.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    const auto seeded = load_experiment(SEILAB_SOURCE_DIR "/configs/desk.cfg", 9);
    CHECK(seeded.seed == 9);
}
