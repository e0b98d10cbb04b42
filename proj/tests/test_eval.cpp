#include <doctest.h>

#include <functional>
#include <set>
#include <sstream>

#include "seilab/eval/classifier.hpp"
#include "seilab/eval/comparison.hpp"
#include "seilab/eval/report.hpp"

using namespace seilab;

namespace {

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);)
        if (line.find(needle) != std::string::npos) ++n;
    return n;
}

}  // namespace

TEST_CASE("classify returns the 1-based argmax and breaks ties toward the lowest index") {
    const float a[] = {0.1f, 0.7f, 0.2f};
    CHECK(classify(a) == 2);
    const float tie[] = {0.4f, 0.1f, 0.4f, 0.1f};
    CHECK(classify(tie) == 1);
    const float late[] = {0.1f, 0.1f, 0.4f, 0.4f};
    CHECK(classify(late) == 3);
}

TEST_CASE("evaluate pools outcomes into percent-correct cells") {
    std::vector<Outcome> o;
    for (int i = 0; i < 4; ++i) o.push_back({1, 9, i < 3 ? 1 : 2});
    for (int i = 0; i < 5; ++i) o.push_back({2, 9, i < 1 ? 2 : 1});
    for (int i = 0; i < 2; ++i) o.push_back({1, 12, 1});
    const auto r = evaluate(o, Method::Lai, 5e6, {9, 12}, {1, 2});
    CHECK(*r.cell(9, 1) == doctest::Approx(75.0));
    CHECK(*r.cell(9, 2) == doctest::Approx(20.0));
    CHECK(*r.cell(12, 1) == doctest::Approx(100.0));
    CHECK_FALSE(r.cell(12, 2).has_value());
    CHECK(*r.average(9) == doctest::Approx(47.5));
    CHECK(*r.average(12) == doctest::Approx(100.0));
    CHECK(*r.mean_over_snr() == doctest::Approx(73.75));
}

TEST_CASE("report CSV layout, NA cells, hash line and file name") {
    std::vector<Outcome> o{{1, 9, 1}, {2, 9, 1}};
    const auto r = evaluate(o, Method::Csi, 2.5e6, {9, 12}, {1, 2});
    const auto csv = report_csv(r, "deadbeef");
    CHECK(csv.rfind("# config_hash=deadbeef\n", 0) == 0);
    CHECK(csv.find("method,f_low_hz,snr_db,emitter_id,accuracy_pct") != std::string::npos);
    CHECK(count_lines_with(csv, "NA") == 3);
    CHECK(csv.find("csi,2500000,9,0,50.0") != std::string::npos);
    CHECK(report_file_name(r) == "report_csi_2500khz.csv");
    CHECK(method_name(parse_method("cnn_only")) == "cnn_only");
    CHECK_THROWS(parse_method("bogus"));
}

TEST_CASE("training SNR map") {
    const auto m = TrainSnrMap::defaults();
    CHECK(m.train_snr(9) == 9);
    CHECK(m.train_snr(15) == 9);
    CHECK(m.train_snr(18) == 12);
    CHECK(m.train_snr(27) == 15);
    CHECK(m.train_snr(30) == 18);
    CHECK(m.train_snrs() == std::vector<double>{9, 12, 15, 18});
    CHECK_THROWS(m.train_snr(10));
    CHECK(TrainSnrMap::identity({3, 6}).train_snr(6) == 6);
}

TEST_CASE("required classifiers share widths across methods") {
    const auto snr = TrainSnrMap::identity({9, 21});
    const auto keys = required_classifiers({2.5e6, 5e6}, {Method::Cgan, Method::CnnOnly, Method::Lai}, snr);
    const std::vector<ClassifierKey> want{{320, 9}, {320, 21}, {40, 9}, {40, 21}, {80, 9}, {80, 21}};
    CHECK(keys == want);
    CHECK(required_classifiers({}, {Method::FullRate}, snr).size() == 2);
}

TEST_CASE("plot data groups cgan and cnn_only across three rates") {
    std::vector<EvalReport> reports;
    for (double f : {2.5e6, 5e6, 10e6})
        for (Method m : {Method::Cgan, Method::CnnOnly}) {
            std::vector<Outcome> o{{1, 9, 1}};
            reports.push_back(evaluate(o, m, f, {9}, {1}));
        }
    const auto csv = plotdata_csv(reports, "h");
    CHECK(csv.rfind("# config_hash=h\n", 0) == 0);
    CHECK(count_lines_with(csv, "cgan_vs_cnn_only,") == 6);
    CHECK(count_lines_with(csv, "csi_vs_lai,") == 0);
}

TEST_CASE("a tiny comparison yields accuracies within [0, 100]") {
    DatasetManifest m;
    m.fleet = default_fleet();
    m.fleet.resize(2);
    m.per_emitter_count = 10;
    m.train_count_per_realization = 8;
    m.realizations = 1;
    m.snr_grid = {21};
    m.seed = 3;
    m.low_rate_factors = {4};
    const auto data = build_dataset_in_memory(m);
    ComparisonConfig cfg;
    cfg.snr_map = TrainSnrMap::identity({21});
    cfg.classifier.num_classes = 2;
    cfg.classifier.epochs = 2;
    cfg.classifier.minibatch = 4;
    cfg.seed = 8;
    GeneratorProvider none = [](double) -> TrainedGenerator& { throw PrerequisiteError("no generator"); };
    const auto reports =
        run_comparison(data, {5e6}, {Method::Lai, Method::Csi, Method::CnnOnly, Method::FullRate}, cfg, none);
    CHECK(reports.size() == 4);
    for (const auto& r : reports) {
        CHECK(r.cells.size() == 2);
        for (const auto& [key, v] : r.cells) {
            CHECK(v >= 0.0);
            CHECK(v <= 100.0);
        }
    }
    CHECK_THROWS_AS(run_comparison(data, {5e6}, {Method::Cgan}, cfg, none), PrerequisiteError);
}

TEST_CASE("classifier configuration validation") {
    ClassifierConfig c;
    CHECK_NOTHROW(c.validate());
    c.holdout_fraction = 1.0;
    CHECK_THROWS(c.validate());
    c = {};
    c.epochs = 0;
    CHECK_THROWS(c.validate());
}

namespace {

std::vector<Outcome> balanced(int per_cell, const std::function<int(int)>& predict) {
    std::vector<Outcome> o;
    for (double snr : {9.0, 12.0})
        for (int e = 1; e <= 4; ++e)
            for (int i = 0; i < per_cell; ++i) o.push_back({e, snr, predict(e)});
    return o;
}

std::vector<PreambleTensor> planted(std::size_t per_class, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<PreambleTensor> ts;
    for (int label = 1; label <= 4; ++label)
        for (std::size_t i = 0; i < per_class; ++i) {
            PreambleTensor t(40, 1);
            for (auto& v : t.data) v = rng.uniform(0.0, 0.2);
            for (std::size_t c = 0; c < 40; ++c) t.at(0, std::size_t(label - 1), c) = 1.0;
            t.label = label;
            ts.push_back(t);
        }
    return ts;
}

}  // namespace

TEST_CASE("evaluate: oracle classifiers") {
    const auto perfect = evaluate(balanced(5, [](int e) { return e; }), Method::FullRate, 0, {9, 12}, {1, 2, 3, 4});
    CHECK(*perfect.average(9) == 100.0);
    CHECK(*perfect.mean_over_snr() == 100.0);
    const auto ones = evaluate(balanced(5, [](int) { return 1; }), Method::FullRate, 0, {9, 12}, {1, 2, 3, 4});
    CHECK(*ones.average(12) == doctest::Approx(25.0).epsilon(1e-12));
    double sum = 0;
    for (int e = 1; e <= 4; ++e) sum += *ones.cell(12, e);
    CHECK(std::abs(*ones.average(12) - sum / 4) < 1e-9);
}

TEST_CASE("training SNR map never trains above the test SNR") {
    for (const auto& [test, train] : TrainSnrMap::defaults().pairs()) CHECK(train <= test);
    CHECK_THROWS(TrainSnrMap({{9, 12}}));
}

TEST_CASE("classifier learns a planted feature and l2 changes the solution") {
    const auto ts = planted(8, 1);
    ClassifierConfig cfg;
    cfg.epochs = 15;
    cfg.patience = 15;
    cfg.minibatch = 8;
    cfg.adam.l2 = 0.0;
    auto plain = train_classifier(ts, cfg, 5);
    const auto probe = planted(2, 99);
    const auto pred = classify_all(plain.net, probe);
    for (std::size_t i = 0; i < probe.size(); ++i) CHECK(pred[i] == probe[i].label);
    const std::size_t e = plain.train_loss.size();
    REQUIRE(e >= 11);
    CHECK(plain.train_loss[10] <= plain.train_loss[0] * 1.05);

    cfg.adam.l2 = 1e-2;
    auto reg = train_classifier(ts, cfg, 5);
    CHECK_FALSE(reg.net.parameters()[0]->value == plain.net.parameters()[0]->value);
    CHECK_THROWS(train_classifier(std::vector<PreambleTensor>{}, cfg, 5));
}

TEST_CASE("train and test records never share a base preamble") {
    DatasetManifest m;
    m.fleet = default_fleet();
    m.per_emitter_count = 12;
    m.train_count_per_realization = 9;
    m.realizations = 2;
    m.snr_grid = {9, 30};
    m.seed = 4;
    m.low_rate_factors = {8};
    const auto d = build_dataset_in_memory(m);
    std::set<std::pair<int, int>> train;
    for (const auto& r : d.train_high) train.insert({r.emitter_id, r.preamble_index});
    for (const auto& r : d.test) CHECK(train.count({r.emitter_id, r.preamble_index}) == 0);
}
