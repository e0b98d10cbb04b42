#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "seilab/common.hpp"
#include "seilab/nn/checkpoint.hpp"
#include "seilab/pipeline/pipeline.hpp"
#include "seilab/resample/interpolate.hpp"
#include "seilab/signal/fir.hpp"
#include "seilab/spectro/spectrogram.hpp"

namespace fs = std::filesystem;

namespace seilab::cli {

namespace {

long long khz(double hz) { return std::llround(hz / 1e3); }

std::string snr_tag(double snr) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", snr);
    return buf;
}

std::string mhz_text(double hz) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", hz / 1e6);
    return buf;
}

std::string hash_line(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno));
        o << text;
        if (!o) throw IoError("write failed on " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool non_empty_dir(const fs::path& p) { return fs::is_directory(p) && !fs::is_empty(p); }

/// Options shared by every subcommand.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    bool force = false;
    bool augment = false;
    std::vector<double> f_low_mhz;
    std::vector<std::string> methods;
};

class Session {
public:
    Session(const Common& opts, std::ostream& out, std::ostream& err) : opts_(opts), out_(out), err_(err) {
        cfg_ = load_experiment(opts.config, opts.seed);
        if (opts.augment) {
            cfg_.augment = true;
            cfg_.validate();
        }
        hash_ = cfg_.hash();
        layout_.root = cfg_.output_dir;
        if (!opts.f_low_mhz.empty()) {
            f_lows_.clear();
            for (double f : opts.f_low_mhz) {
                if (!is_supported_low_rate(f * 1e6))
                    throw ConfigError("--f-low: " + mhz_text(f * 1e6) + " MHz is not one of 2.5, 5, 10");
                if (std::find(cfg_.f_lows.begin(), cfg_.f_lows.end(), f * 1e6) == cfg_.f_lows.end())
                    throw ConfigError("--f-low: " + mhz_text(f * 1e6) +
                                      " MHz is not listed in [evaluation] f_low_mhz of " + opts.config);
                f_lows_.push_back(f * 1e6);
            }
        } else {
            f_lows_ = cfg_.f_lows;
        }
    }

    int generate();
    int train(const std::string& stage, int interrupt_after);
    int resample();
    int evaluate();
    int compare_spectro();

private:
    /// The command line that re-creates a missing artifact.
    std::string command(const std::string& sub, const std::string& extra = "") const {
        std::string s = "seilab " + sub + " --config " + opts_.config;
        if (opts_.seed) s += " --seed " + std::to_string(*opts_.seed);
        if (opts_.augment) s += " --augment";
        return s + extra;
    }

    void refuse_overwrite(const fs::path& p) const {
        throw ConfigError(p.string() + " already exists; pass --force to overwrite");
    }

    void warn_if_stale(const std::string& tag, const fs::path& what) const {
        if (tag != hash_)
            err_ << "warning: " << what.string() << " was produced by config " << tag << ", current config is "
                 << hash_ << "\n";
    }

    const Dataset& dataset() {
        if (!data_) {
            if (!fs::exists(layout_.manifest()))
                throw PrerequisiteError("no dataset under " + layout_.dataset_dir().string() +
                                        "; run: " + command("generate"));
            const auto text = read_text(layout_.manifest());
            const auto first = text.substr(0, text.find('\n'));
            const std::string key = "# config_hash=";
            if (first.rfind(key, 0) == 0) warn_if_stale(first.substr(key.size()), layout_.manifest());
            data_ = load_dataset(layout_);
        }
        return *data_;
    }

    std::vector<Method> methods() const {
        if (opts_.methods.empty()) return cfg_.methods;
        std::vector<Method> m;
        for (const auto& s : opts_.methods) {
            const Method x = parse_method(s);
            if (std::find(m.begin(), m.end(), x) == m.end()) m.push_back(x);
        }
        return m;
    }

    int train_cgan_stage(int interrupt_after);
    int train_classifier_stage();

    Common opts_;
    std::ostream& out_;
    std::ostream& err_;
    ExperimentConfig cfg_;
    std::string hash_;
    Layout layout_;
    std::vector<double> f_lows_;
    std::optional<Dataset> data_;
};

int Session::generate() {
    const auto dir = layout_.dataset_dir();
    if (non_empty_dir(dir)) {
        if (!opts_.force) refuse_overwrite(dir);
        fs::remove_all(dir);
    }
    fs::create_directories(dir);
    const auto& m = cfg_.dataset;
    SeirWriter high(layout_.train_high()), test(layout_.test());
    std::map<int, SeirWriter> low;
    for (int f : m.low_rate_factors) low.emplace(f, layout_.train_low(f));
    std::map<std::pair<int, double>, std::pair<int, int>> counts;
    out_ << "generating " << m.emitter_count() * m.per_emitter_count << " base preambles ("
         << m.emitter_count() << " emitters x " << m.per_emitter_count << ") into " << dir.string() << "\n";
    build_dataset(m, [&](Split split, int factor, const PreambleRecord& r) {
        switch (split) {
            case Split::TrainHigh:
                high.write(r);
                ++counts[{r.emitter_id, r.snr_db}].first;
                break;
            case Split::TrainLow: low.at(factor).write(r); break;
            case Split::Test:
                test.write(r);
                ++counts[{r.emitter_id, r.snr_db}].second;
                break;
        }
    });
    high.close();
    test.close();
    for (auto& [f, w] : low) w.close();
    write_text(layout_.manifest(), hash_line(hash_) + manifest_to_text(m));

    std::ostringstream csv;
    csv << hash_line(hash_) << "emitter_id,snr_db,train_records,test_records\n";
    out_ << "emitter  snr_db  train  test\n";
    for (const auto& [key, c] : counts) {
        csv << key.first << ',' << snr_tag(key.second) << ',' << c.first << ',' << c.second << '\n';
        char line[80];
        std::snprintf(line, sizeof line, "%7d  %6g  %5d  %4d\n", key.first, key.second, c.first, c.second);
        out_ << line;
    }
    write_text(layout_.summary(), csv.str());
    out_ << "base preambles: " << m.emitter_count() * m.per_emitter_count << "\n"
         << "config hash: " << hash_ << "\n";
    return kExitOk;
}

int Session::train(const std::string& stage, int interrupt_after) {
    if (stage == "cgan") return train_cgan_stage(interrupt_after);
    return train_classifier_stage();
}

int Session::train_cgan_stage(int interrupt_after) {
    const auto& data = dataset();
    fs::create_directories(layout_.checkpoints());
    bool interrupted = false;
    for (double f : f_lows_) {
        const auto ckpt = layout_.cgan(f);
        const auto state = layout_.cgan_state(f);
        if (fs::exists(ckpt)) {
            if (!opts_.force) {
                out_ << ckpt.string() << " exists; skipping (pass --force to retrain)\n";
                continue;
            }
            fs::remove(ckpt);
            fs::remove(state);
        }
        auto pairs = cgan_training_pairs(data, factor_for_rate(f), cfg_.cgan_train_snrs);
        CganRunOptions ro;
        ro.state_file = state;
        ro.interrupt_after = interrupt_after;
        ro.on_epoch = [&](const EpochLog& e) {
            if (e.epoch % 10 == 0 || e.equilibrium)
                out_ << "  epoch " << e.epoch << " d_loss " << e.d_loss << " g_loss " << e.g_loss
                     << (e.equilibrium ? " (equilibrium)" : "") << "\n";
        };
        out_ << "training cGAN at " << mhz_text(f) << " MHz on " << pairs.high.size() << " pairs\n";
        auto res = train_cgan(pairs.high, pairs.low, cfg_.cgan_for(f), ro);
        std::string log = hash_line(hash_) + training_log_header() + "\n";
        for (const auto& row : res.log) log += training_log_row(row) + "\n";
        write_text(layout_.cgan_log(f), log);
        if (!res.completed) {
            out_ << "stopped after epoch " << (res.log.empty() ? 0 : res.log.back().epoch)
                 << "; rerun the same command to resume from " << state.string() << "\n";
            interrupted = true;
            continue;
        }
        res.generator.save(ckpt, hash_);
        fs::remove(state);
        out_ << "wrote " << ckpt.string() << " (" << res.log.size() << " epochs)\n";
    }
    if (interrupted) out_ << "training incomplete\n";
    return kExitOk;
}

int Session::train_classifier_stage() {
    const auto& data = dataset();
    auto cmp = cfg_.comparison();
    for (const auto& key : required_classifiers(f_lows_, methods(), cfg_.snr_map)) {
        const auto path = layout_.classifier(key.width, key.train_snr);
        if (fs::exists(path) && !opts_.force) {
            out_ << path.string() << " exists; skipping (pass --force to retrain)\n";
            continue;
        }
        out_ << "training classifier width " << key.width << " at " << snr_tag(key.train_snr) << " dB\n";
        auto tc = train_comparison_classifier(data, key.width, key.train_snr, cmp);
        std::ostringstream log;
        log << hash_line(hash_) << "epoch,train_loss,holdout_loss,best\n";
        for (std::size_t e = 0; e < tc.train_loss.size(); ++e) {
            log << e + 1 << ',' << tc.train_loss[e] << ',';
            if (e < tc.holdout_loss.size()) log << tc.holdout_loss[e];
            else log << "NA";
            log << ',' << (static_cast<int>(e + 1) == tc.best_epoch ? 1 : 0) << '\n';
        }
        write_text(layout_.classifier_log(key.width, key.train_snr), log.str());
        save_classifier(path, tc.net, key.width, key.train_snr, hash_);
        out_ << "wrote " << path.string() << " (best epoch " << tc.best_epoch << ")\n";
    }
    return kExitOk;
}

int Session::resample() {
    std::vector<Method> ms;
    for (Method m : opts_.methods.empty() ? std::vector<Method>{Method::Lai, Method::Csi} : methods()) {
        if (m != Method::Lai && m != Method::Csi)
            throw ConfigError("--method: resample supports lai and csi, not " + method_name(m));
        ms.push_back(m);
    }
    for (Method m : ms)
        for (double f : f_lows_)
            if (fs::exists(layout_.resampled(method_name(m), f)) && !opts_.force)
                refuse_overwrite(layout_.resampled(method_name(m), f));
    const auto& data = dataset();
    std::ostringstream index;
    index << hash_line(hash_) << "method,f_low_hz,file,records\n";
    for (Method m : ms)
        for (double f : f_lows_) {
            const int factor = factor_for_rate(f);
            const auto path = layout_.resampled(method_name(m), f);
            fs::create_directories(path.parent_path());
            SeirWriter w(path);
            for (const auto& r : data.test) {
                const auto lo = decimate(r.sequence, factor);
                PreambleRecord up{r.emitter_id, r.snr_db, r.realization,
                                  m == Method::Lai ? lai_upsample(lo, factor) : csi_upsample(lo, factor), -1};
                w.write(up);
            }
            w.close();
            out_ << "wrote " << path.string() << " (" << w.count() << " records)\n";
            index << method_name(m) << ',' << khz(f) * 1000 << ',' << path.filename().string() << ',' << w.count()
                  << '\n';
        }
    write_text(layout_.root / "resampled" / "index.csv", index.str());
    return kExitOk;
}

int Session::evaluate() {
    const auto ms = methods();
    const auto dir = layout_.reports();
    if (non_empty_dir(dir) && !opts_.force) refuse_overwrite(dir);

    const bool gan = std::find(ms.begin(), ms.end(), Method::Cgan) != ms.end();
    if (gan)
        for (double f : f_lows_)
            if (!fs::exists(layout_.cgan(f)))
                throw PrerequisiteError("missing cGAN checkpoint " + layout_.cgan(f).string() + "; run: " +
                                        command("train", " --stage cgan --f-low " + mhz_text(f)));
    for (const auto& key : required_classifiers(f_lows_, ms, cfg_.snr_map))
        if (!fs::exists(layout_.classifier(key.width, key.train_snr)))
            throw PrerequisiteError("missing classifier checkpoint " +
                                    layout_.classifier(key.width, key.train_snr).string() +
                                    "; run: " + command("train", " --stage classifier"));
    const auto& data = dataset();

    std::map<double, TrainedGenerator> gens;
    std::map<std::pair<std::size_t, long>, nn::Network<float>> nets;
    auto cmp = cfg_.comparison();
    cmp.progress = [&](const std::string& s) { out_ << s << "\n"; };
    auto reports = run_comparison(
        data, f_lows_, ms, cmp,
        [&](double f) -> TrainedGenerator& {
            auto it = gens.find(f);
            if (it == gens.end()) {
                warn_if_stale(TrainedGenerator::stored_tag(layout_.cgan(f)), layout_.cgan(f));
                it = gens.emplace(f, TrainedGenerator::load(layout_.cgan(f))).first;
            }
            return it->second;
        },
        [&](std::size_t width, double snr) -> nn::Network<float>& {
            const std::pair<std::size_t, long> key{width, std::lround(snr * 1000)};
            auto it = nets.find(key);
            if (it == nets.end()) it = nets.emplace(key, load_classifier(layout_.classifier(width, snr))).first;
            return it->second;
        });

    fs::create_directories(dir);
    for (const auto& r : reports) {
        write_text(dir / report_file_name(r), report_csv(r, hash_));
        char line[120];
        const auto mean = r.mean_over_snr();
        std::snprintf(line, sizeof line, "%-10s %6s MHz  mean accuracy %s\n", method_name(r.method).c_str(),
                      mhz_text(r.f_low_hz).c_str(), mean ? (std::to_string(*mean).substr(0, 5) + "%").c_str() : "NA");
        out_ << line;
    }
    write_text(dir / "plotdata.csv", plotdata_csv(reports, hash_));
    out_ << "wrote " << reports.size() << " report CSVs and plotdata.csv to " << dir.string() << "\n";
    return kExitOk;
}

int Session::compare_spectro() {
    const auto dir = layout_.spectro();
    if (non_empty_dir(dir) && !opts_.force) refuse_overwrite(dir);
    const auto& data = dataset();
    fs::create_directories(dir);
    std::ostringstream summary;
    summary << hash_line(hash_) << "f_low_hz,window,hop,spreading_factor,bandwidth_hz,m,output_width,emitter_id,file\n";
    for (double f : f_lows_) {
        SpectroConfig sc = cfg_.spectro;
        sc.f_low_hz = f;
        sc.bandwidth_hz = wifi_bandwidth_for(f);
        const std::size_t m = spectro_width(sc);
        std::map<int, const PreambleRecord*> pick;
        for (const auto& r : data.test) {
            auto& p = pick[r.emitter_id];
            if (!p || r.snr_db > p->snr_db) p = &r;
        }
        for (const auto& [id, rec] : pick) {
            const auto s = channel_independent_spectrogram(decimate(rec->sequence, factor_for_rate(f)), sc);
            if (!s.all_finite()) throw NumericError("non-finite spectrogram for emitter " + std::to_string(id));
            const std::string name = "ci_" + std::to_string(khz(f)) + "khz_e" + std::to_string(id) + ".csv";
            write_text(dir / name, hash_line(hash_) + spectrogram_csv(s));
            summary << static_cast<long long>(f) << ',' << sc.window << ',' << sc.hop << ',' << sc.spreading_factor
                    << ',' << std::llround(sc.bandwidth_hz) << ',' << m << ',' << s.cols << ',' << id << ',' << name << '\n';
        }
        out_ << mhz_text(f) << " MHz: M = " << m << ", spectrogram " << sc.window << " x " << m - 1 << "\n";
    }
    write_text(dir / "summary.csv", summary.str());
    out_ << "wrote spectrograms to " << dir.string() << "\n";
    return kExitOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>("--seed", [&c](const std::uint64_t& s) { c.seed = s; },
                                            "override [experiment] seed");
    sub->add_flag("--force", c.force, "overwrite existing outputs");
    sub->add_flag("--augment", c.augment, "enable online AWGN augmentation during training");
}

}  // namespace

fs::path Layout::train_low(int factor) const {
    return dataset_dir() / ("train_low_x" + std::to_string(factor) + ".seir");
}
fs::path Layout::cgan(double f) const { return checkpoints() / ("cgan_" + std::to_string(khz(f)) + "khz.seig"); }
fs::path Layout::cgan_state(double f) const {
    return checkpoints() / ("cgan_" + std::to_string(khz(f)) + "khz.state");
}
fs::path Layout::cgan_log(double f) const { return root / "logs" / ("cgan_" + std::to_string(khz(f)) + "khz.csv"); }
fs::path Layout::classifier(std::size_t width, double snr) const {
    return checkpoints() / ("classifier_w" + std::to_string(width) + "_snr" + snr_tag(snr) + ".seic");
}
fs::path Layout::classifier_log(std::size_t width, double snr) const {
    return root / "logs" / ("classifier_w" + std::to_string(width) + "_snr" + snr_tag(snr) + ".csv");
}
fs::path Layout::resampled(const std::string& method, double f) const {
    return root / "resampled" / (method + "_" + std::to_string(khz(f)) + "khz.seir");
}

void save_classifier(const fs::path& path, nn::Network<float>& net, std::size_t width, double train_snr,
                     const std::string& tag) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw IoError("cannot write " + tmp.string() + ": " + std::strerror(errno));
        o.write("SEIC", 4);
        nn::write_u16(o, 1);
        nn::write_u32(o, static_cast<std::uint32_t>(tag.size()));
        o.write(tag.data(), static_cast<std::streamsize>(tag.size()));
        nn::write_u32(o, static_cast<std::uint32_t>(width));
        nn::write_f64(o, train_snr);
        nn::write_network(o, net);
        if (!o) throw IoError("write failed on " + tmp.string());
    }
    fs::rename(tmp, path);
}

nn::Network<float> load_classifier(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PrerequisiteError("cannot read classifier checkpoint " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SEIC", 4) != 0 || nn::read_u16(in) != 1)
        throw IoError(path.string() + " is not a classifier checkpoint");
    const auto n = nn::read_u32(in);
    if (n > (1u << 20)) throw IoError(path.string() + ": corrupt tag length");
    in.ignore(n);
    nn::read_u32(in);
    nn::read_f64(in);
    return nn::read_network(in);
}

Dataset load_dataset(const Layout& layout) {
    Dataset d;
    d.manifest = manifest_from_text(read_text(layout.manifest()));
    d.train_high = read_seir(layout.train_high());
    for (int f : d.manifest.low_rate_factors) {
        d.train_low[f] = read_seir(layout.train_low(f));
        if (d.train_low[f].size() != d.train_high.size())
            throw IoError(layout.train_low(f).string() + ": record count does not match " +
                          layout.train_high().string());
    }
    d.test = read_seir(layout.test());
    return d;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Emitter identification experiments on synthetic 802.11a preambles", "seilab"};
    app.require_subcommand(1);
    Common c;
    std::string stage;
    int interrupt_after = 0;

    auto* gen = app.add_subcommand("generate", "synthesize the dataset and its decimated copies");
    add_common(gen, c);

    auto* train = app.add_subcommand("train", "train cGANs or classifiers (resumable)");
    add_common(train, c);
    train->add_option("--stage", stage, "cgan or classifier")->required()->check(CLI::IsMember({"cgan", "classifier"}));
    train->add_option("--f-low", c.f_low_mhz, "collection rate(s) in MHz (default: all configured)");
    train->add_option("--method", c.methods, "restrict classifier training to these methods' needs");
    train->add_option("--interrupt-after", interrupt_after, "stop each cGAN after this many epochs (resume later)")
        ->check(CLI::NonNegativeNumber);

    auto* res = app.add_subcommand("resample", "upsample the decimated test set with lai and/or csi");
    add_common(res, c);
    res->add_option("--f-low", c.f_low_mhz, "collection rate(s) in MHz");
    res->add_option("--method", c.methods, "lai and/or csi");

    auto* ev = app.add_subcommand("evaluate", "classify the test set with every method and write reports");
    add_common(ev, c);
    ev->add_option("--f-low", c.f_low_mhz, "collection rate(s) in MHz");
    ev->add_option("--method", c.methods, "cgan, cnn_only, lai, csi, full_rate");

    auto* sp = app.add_subcommand("compare-spectro", "channel-independent spectrograms of decimated test preambles");
    add_common(sp, c);
    sp->add_option("--f-low", c.f_low_mhz, "collection rate(s) in MHz");

    std::vector<std::string> argv{args.rbegin(), args.rend()};
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        Session s(c, out, err);
        if (*gen) return s.generate();
        if (*train) return s.train(stage, interrupt_after);
        if (*res) return s.resample();
        if (*ev) return s.evaluate();
        return s.compare_spectro();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PrerequisiteError& e) {
        err << "missing prerequisite: " << e.what() << "\n";
        return kExitPrerequisite;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace seilab::cli
