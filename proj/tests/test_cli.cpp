#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using namespace seilab;

namespace {

struct Sandbox {
    fs::path dir;
    fs::path config;

    explicit Sandbox(const std::string& name, bool with_seed = true, const std::string& rates = "5") {
        dir = fs::temp_directory_path() / ("seilab_test_cli_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);
        config = dir / "tiny.cfg";
        std::ofstream f(config);
        f << "[experiment]\n";
        if (with_seed) f << "seed = 5\n";
        f << "output_dir = " << (dir / "out").string() << "\n"
          << "[dataset]\nemitters = 2\nper_emitter_count = 20\ntrain_count = 16\nrealizations = 1\nsnr_grid_db = 9,12\n"
          << "[cgan]\nminibatch = 8\nepochs = 3\nmax_batches_per_epoch = 1\n"
          << "[classifier]\nepochs = 2\npatience = 2\nsnr_map = 9:9,12:9\n"
          << "[evaluation]\nf_low_mhz = " << rates << "\n";
    }
    ~Sandbox() { fs::remove_all(dir); }

    cli::Layout layout() const { return {dir / "out"}; }

    int run(std::vector<std::string> args, std::string* out = nullptr, std::string* err = nullptr) const {
        args.insert(args.begin() + 1, {"--config", config.string()});
        std::ostringstream o, e;
        const int code = cli::run(args, o, e);
        if (out) *out = o.str();
        if (err) *err = e.str();
        return code;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("cli: a missing seed is a configuration error naming the field") {
    Sandbox s("noseed", false);
    std::string err;
    CHECK(s.run({"generate"}, nullptr, &err) == cli::kExitConfig);
    CHECK(err.find("seed") != std::string::npos);
}

TEST_CASE("cli: unknown subcommands and unsupported rates are rejected") {
    Sandbox s("args");
    CHECK(s.run({"generate", "--bogus"}) == cli::kExitConfig);
    CHECK(s.run({"evaluate", "--f-low", "4"}) == cli::kExitConfig);
}

TEST_CASE("cli: generate refuses to overwrite, evaluate names the missing step") {
    Sandbox s("prereq");
    std::string out, err;
    REQUIRE(s.run({"generate"}, &out) == cli::kExitOk);
    CHECK(fs::exists(s.layout().manifest()));
    CHECK(slurp(s.layout().manifest()).rfind("# config_hash=", 0) == 0);
    CHECK(s.run({"generate"}, nullptr, &err) == cli::kExitConfig);
    CHECK(err.find("--force") != std::string::npos);
    CHECK(s.run({"generate", "--force"}) == cli::kExitOk);

    CHECK(s.run({"evaluate"}, nullptr, &err) == cli::kExitPrerequisite);
    CHECK(err.find("seilab train --config " + s.config.string() + " --stage cgan --f-low 5") != std::string::npos);
}

TEST_CASE("cli: full chain writes hashed reports with accuracies in range") {
    Sandbox s("chain");
    REQUIRE(s.run({"generate"}) == cli::kExitOk);
    REQUIRE(s.run({"train", "--stage", "cgan"}) == cli::kExitOk);
    REQUIRE(s.run({"train", "--stage", "classifier"}) == cli::kExitOk);
    REQUIRE(s.run({"resample"}) == cli::kExitOk);
    std::string out;
    REQUIRE(s.run({"evaluate"}, &out) == cli::kExitOk);
    REQUIRE(s.run({"compare-spectro"}) == cli::kExitOk);

    const auto l = s.layout();
    CHECK(fs::exists(l.cgan(5e6)));
    CHECK(fs::exists(l.resampled("csi", 5e6)));
    CHECK(fs::exists(l.spectro() / "summary.csv"));
    std::string hash;
    std::size_t reports = 0;
    for (const auto& e : fs::directory_iterator(l.reports())) {
        if (e.path().filename().string().rfind("report_", 0) != 0) continue;
        ++reports;
        std::istringstream in(slurp(e.path()));
        std::string line;
        std::getline(in, line);
        REQUIRE(line.rfind("# config_hash=", 0) == 0);
        if (hash.empty()) hash = line;
        CHECK(line == hash);
        std::getline(in, line);
        while (std::getline(in, line)) {
            const auto v = line.substr(line.rfind(',') + 1);
            if (v == "NA") continue;
            const double a = std::stod(v);
            CHECK(a >= 0.0);
            CHECK(a <= 100.0);
        }
    }
    CHECK(reports == 5);
    CHECK(fs::exists(l.reports() / "plotdata.csv"));
    CHECK(s.run({"evaluate"}) == cli::kExitConfig);
}

TEST_CASE("cli: interrupted then resumed cGAN training writes the same checkpoint") {
    Sandbox s("resume");
    REQUIRE(s.run({"generate"}) == cli::kExitOk);
    REQUIRE(s.run({"train", "--stage", "cgan"}) == cli::kExitOk);
    const auto ckpt = s.layout().cgan(5e6);
    const auto whole = slurp(ckpt);
    REQUIRE(!whole.empty());

    std::string out;
    REQUIRE(s.run({"train", "--stage", "cgan", "--force", "--interrupt-after", "1"}, &out) == cli::kExitOk);
    CHECK(out.find("resume") != std::string::npos);
    CHECK_FALSE(fs::exists(ckpt));
    CHECK(fs::exists(s.layout().cgan_state(5e6)));
    REQUIRE(s.run({"train", "--stage", "cgan"}) == cli::kExitOk);
    CHECK(slurp(ckpt) == whole);
    CHECK_FALSE(fs::exists(s.layout().cgan_state(5e6)));
}

TEST_CASE("cli: every method at three rates gives twelve reports plus the full-rate reference") {
    Sandbox s("grid", true, "2.5,5,10");
    REQUIRE(s.run({"generate"}) == cli::kExitOk);
    REQUIRE(s.run({"train", "--stage", "cgan"}) == cli::kExitOk);
    REQUIRE(s.run({"train", "--stage", "classifier"}) == cli::kExitOk);
    REQUIRE(s.run({"resample"}) == cli::kExitOk);
    REQUIRE(s.run({"evaluate"}) == cli::kExitOk);
    std::size_t reports = 0;
    for (const auto& e : fs::directory_iterator(s.layout().reports()))
        if (e.path().filename().string().rfind("report_", 0) == 0) ++reports;
    CHECK(reports == 13);
    const auto plot = slurp(s.layout().reports() / "plotdata.csv");
    std::set<std::string> series;
    std::istringstream in(plot);
    for (std::string line; std::getline(in, line);)
        if (line.rfind("cgan_vs_cnn_only,", 0) == 0) series.insert(line.substr(0, line.find(',', 17)));
    CHECK(series.size() == 6);
}
