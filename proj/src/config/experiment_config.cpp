#include "seilab/config/experiment_config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "seilab/common.hpp"
#include "seilab/rng.hpp"
#include "seilab/signal/noise.hpp"

namespace seilab {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + f(v[i]);
    return out;
}

std::string loss_name(nn::GeneratorLoss l) {
    return l == nn::GeneratorLoss::NonSaturating ? "non_saturating" : "minimax";
}

const std::map<std::string, std::set<std::string>>& allowed_fields() {
    static const std::map<std::string, std::set<std::string>> a{
        {"experiment", {"seed", "output_dir"}},
        {"dataset",
         {"fleet", "emitters", "fleet_spread", "per_emitter_count", "train_count", "realizations", "snr_grid_db"}},
        {"cgan",
         {"minibatch", "epochs", "k", "equilibrium_eps", "d_lr", "d_l2", "g_lr", "g_momentum", "l1_weight", "g_loss",
          "max_batches_per_epoch", "train_snrs_db"}},
        {"classifier", {"epochs", "patience", "holdout_fraction", "minibatch", "lr", "l2", "snr_map"}},
        {"evaluation", {"methods", "f_low_mhz", "conditioning"}},
        {"augment", {"enabled", "snr_lo_db", "snr_hi_db"}},
        {"spectro", {"window", "hop", "spreading_factor"}},
    };
    return a;
}

std::vector<std::pair<double, double>> parse_snr_map(const KvConfig& kv) {
    std::vector<std::pair<double, double>> out;
    for (const auto& item : kv.get_list("classifier", "snr_map", {})) {
        const auto colon = item.find(':');
        char* end = nullptr;
        if (colon == std::string::npos)
            throw ConfigError("[classifier] snr_map: expected test:train pairs, bad item '" + item + "'");
        const std::string a = item.substr(0, colon), b = item.substr(colon + 1);
        const double test = std::strtod(a.c_str(), &end);
        if (a.empty() || *end) throw ConfigError("[classifier] snr_map: bad test SNR in '" + item + "'");
        const double train = std::strtod(b.c_str(), &end);
        if (b.empty() || *end) throw ConfigError("[classifier] snr_map: bad train SNR in '" + item + "'");
        out.emplace_back(test, train);
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (fleet != "default" && fleet != "cfo_only")
        throw ConfigError("[dataset] fleet: expected default or cfo_only, got '" + fleet + "'");
    if (emitters < 2) throw ConfigError("[dataset] emitters: need at least 2");
    if (fleet == "default" && emitters > 4) throw ConfigError("[dataset] emitters: the default fleet has 4 emitters");
    try {
        dataset.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[dataset] ") + e.what());
    }
    if (f_lows.empty()) throw ConfigError("[evaluation] f_low_mhz: list is empty");
    for (double f : f_lows)
        if (!is_supported_low_rate(f))
            throw ConfigError("[evaluation] f_low_mhz: " + num(f / 1e6) + " is not one of 2.5, 5, 10");
    if (methods.empty()) throw ConfigError("[evaluation] methods: list is empty");
    for (double s : dataset.snr_grid) {
        double train = 0;
        try {
            train = snr_map.train_snr(s);
        } catch (const ConfigError&) {
            throw ConfigError("[classifier] snr_map: no entry for grid SNR " + num(s) + " dB");
        }
        if (std::none_of(dataset.snr_grid.begin(), dataset.snr_grid.end(),
                         [&](double g) { return std::abs(g - train) < 1e-9; }))
            throw ConfigError("[classifier] snr_map: training SNR " + num(train) + " dB is not on the dataset grid");
    }
    for (double s : cgan_train_snrs)
        if (std::none_of(dataset.snr_grid.begin(), dataset.snr_grid.end(),
                         [&](double g) { return std::abs(g - s) < 1e-9; }))
            throw ConfigError("[cgan] train_snrs_db: " + num(s) + " dB is not on the dataset grid");
    cgan_for(f_lows.front()).validate(0);
    classifier.validate();
    if (augment && !(augment_snr.lo_db <= augment_snr.hi_db))
        throw ConfigError("[augment] snr_lo_db must not exceed snr_hi_db");
    try {
        SpectroConfig s = spectro;
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[spectro] ") + e.what());
    }
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    os << "[experiment]\nseed=" << seed << "\noutput_dir=" << output_dir << '\n';
    os << "[dataset]\nfleet=" << fleet << "\nemitters=" << emitters << "\nfleet_spread=" << num(fleet_spread)
       << "\nper_emitter_count=" << dataset.per_emitter_count
       << "\ntrain_count=" << dataset.train_count_per_realization << "\nrealizations=" << dataset.realizations
       << "\nsnr_grid_db=" << join(dataset.snr_grid, num) << '\n';
    os << "[cgan]\nminibatch=" << cgan.minibatch << "\nepochs=" << cgan.epochs << "\nk=" << cgan.k
       << "\nequilibrium_eps=" << num(cgan.equilibrium_eps) << "\nd_lr=" << num(cgan.d_adam.lr)
       << "\nd_l2=" << num(cgan.d_adam.l2) << "\ng_lr=" << num(cgan.g_lr) << "\ng_momentum=" << num(cgan.g_momentum)
       << "\nl1_weight=" << num(cgan.l1_weight) << "\ng_loss=" << loss_name(cgan.g_loss)
       << "\nmax_batches_per_epoch=" << cgan.max_batches_per_epoch
       << "\ntrain_snrs_db=" << join(cgan_train_snrs, num) << '\n';
    os << "[classifier]\nepochs=" << classifier.epochs << "\npatience=" << classifier.patience
       << "\nholdout_fraction=" << num(classifier.holdout_fraction) << "\nminibatch=" << classifier.minibatch
       << "\nlr=" << num(classifier.adam.lr) << "\nl2=" << num(classifier.adam.l2) << "\nsnr_map="
       << join(snr_map.pairs(), [](const auto& p) { return num(p.first) + ":" + num(p.second); }) << '\n';
    os << "[evaluation]\nmethods=" << join(methods, method_name)
       << "\nf_low_mhz=" << join(f_lows, [](double f) { return num(f / 1e6); })
       << "\nconditioning=" << conditioning_name(conditioning) << '\n';
    os << "[augment]\nenabled=" << (augment ? "true" : "false") << "\nsnr_lo_db=" << num(augment_snr.lo_db)
       << "\nsnr_hi_db=" << num(augment_snr.hi_db) << '\n';
    os << "[spectro]\nwindow=" << spectro.window << "\nhop=" << spectro.hop
       << "\nspreading_factor=" << spectro.spreading_factor << '\n';
    return os.str();
}

std::uint64_t ExperimentConfig::dataset_seed() const { return derive_seed(seed, {1}); }
std::uint64_t ExperimentConfig::comparison_seed() const { return derive_seed(seed, {3}); }

CganConfig ExperimentConfig::cgan_for(double f_low_hz) const {
    CganConfig c = cgan;
    c.f_low_hz = f_low_hz;
    c.seed = derive_seed(seed, {2, static_cast<std::uint64_t>(std::llround(f_low_hz))});
    c.num_labels = emitters;
    c.augment = augment;
    c.augment_snr = augment_snr;
    return c;
}

ComparisonConfig ExperimentConfig::comparison() const {
    ComparisonConfig c;
    c.snr_map = snr_map;
    c.classifier = classifier;
    c.classifier.num_classes = emitters;
    c.classifier.augment = augment;
    c.classifier.augment_snr = augment_snr;
    c.seed = comparison_seed();
    c.conditioning = conditioning;
    return c;
}

ExperimentConfig experiment_from_kv(const KvConfig& kv, std::optional<std::uint64_t> seed_override) {
    kv.reject_unknown(allowed_fields());
    ExperimentConfig c;
    c.seed = seed_override ? *seed_override : kv.require_u64("experiment", "seed");
    c.output_dir = kv.get_string("experiment", "output_dir", c.output_dir);

    c.fleet = kv.get_string("dataset", "fleet", c.fleet);
    c.emitters = static_cast<int>(kv.get_int("dataset", "emitters", c.emitters));
    c.fleet_spread = kv.get_double("dataset", "fleet_spread", c.fleet_spread);
    auto& m = c.dataset;
    m.per_emitter_count = static_cast<int>(kv.get_int("dataset", "per_emitter_count", m.per_emitter_count));
    m.train_count_per_realization = static_cast<int>(kv.get_int("dataset", "train_count", m.train_count_per_realization));
    m.realizations = static_cast<int>(kv.get_int("dataset", "realizations", m.realizations));
    m.snr_grid = kv.get_doubles("dataset", "snr_grid_db", default_snr_grid());

    auto& g = c.cgan;
    g.minibatch = static_cast<std::size_t>(kv.get_int("cgan", "minibatch", static_cast<long long>(g.minibatch)));
    g.epochs = static_cast<int>(kv.get_int("cgan", "epochs", g.epochs));
    g.k = static_cast<int>(kv.get_int("cgan", "k", g.k));
    g.equilibrium_eps = kv.get_double("cgan", "equilibrium_eps", g.equilibrium_eps);
    g.d_adam.lr = kv.get_double("cgan", "d_lr", g.d_adam.lr);
    g.d_adam.l2 = kv.get_double("cgan", "d_l2", g.d_adam.l2);
    g.g_lr = kv.get_double("cgan", "g_lr", g.g_lr);
    g.g_momentum = kv.get_double("cgan", "g_momentum", g.g_momentum);
    g.l1_weight = kv.get_double("cgan", "l1_weight", g.l1_weight);
    const auto gl = kv.get_string("cgan", "g_loss", loss_name(g.g_loss));
    if (gl == "non_saturating") g.g_loss = nn::GeneratorLoss::NonSaturating;
    else if (gl == "minimax") g.g_loss = nn::GeneratorLoss::Minimax;
    else throw ConfigError("[cgan] g_loss: expected non_saturating or minimax, got '" + gl + "'");
    const auto cap = kv.get_int("cgan", "max_batches_per_epoch", 0);
    if (cap < 0) throw ConfigError("[cgan] max_batches_per_epoch must be non-negative");
    g.max_batches_per_epoch = static_cast<std::size_t>(cap);
    c.cgan_train_snrs = kv.get_doubles("cgan", "train_snrs_db", {});
    if (kv.has("cgan", "minibatch") && kv.get_int("cgan", "minibatch", 1) < 1)
        throw ConfigError("[cgan] minibatch must be at least 1");

    auto& k = c.classifier;
    k.epochs = static_cast<int>(kv.get_int("classifier", "epochs", k.epochs));
    k.patience = static_cast<int>(kv.get_int("classifier", "patience", k.patience));
    k.holdout_fraction = kv.get_double("classifier", "holdout_fraction", k.holdout_fraction);
    const auto kmb = kv.get_int("classifier", "minibatch", static_cast<long long>(k.minibatch));
    if (kmb < 1) throw ConfigError("[classifier] minibatch must be at least 1");
    k.minibatch = static_cast<std::size_t>(kmb);
    k.adam.lr = kv.get_double("classifier", "lr", k.adam.lr);
    k.adam.l2 = kv.get_double("classifier", "l2", k.adam.l2);
    if (kv.has("classifier", "snr_map")) c.snr_map = TrainSnrMap(parse_snr_map(kv));

    if (kv.has("evaluation", "methods")) {
        c.methods.clear();
        for (const auto& s : kv.get_list("evaluation", "methods", {})) c.methods.push_back(parse_method(s));
    }
    if (kv.has("evaluation", "f_low_mhz")) {
        c.f_lows.clear();
        for (double f : kv.get_doubles("evaluation", "f_low_mhz", {})) c.f_lows.push_back(f * 1e6);
    }
    c.conditioning = parse_conditioning(kv.get_string("evaluation", "conditioning", conditioning_name(c.conditioning)));

    c.augment = kv.get_bool("augment", "enabled", c.augment);
    c.augment_snr.lo_db = kv.get_double("augment", "snr_lo_db", c.augment_snr.lo_db);
    c.augment_snr.hi_db = kv.get_double("augment", "snr_hi_db", c.augment_snr.hi_db);

    const auto win = kv.get_int("spectro", "window", static_cast<long long>(c.spectro.window));
    const auto hop = kv.get_int("spectro", "hop", static_cast<long long>(c.spectro.hop));
    if (win < 1 || hop < 1) throw ConfigError("[spectro] window and hop must be positive");
    c.spectro.window = static_cast<std::size_t>(win);
    c.spectro.hop = static_cast<std::size_t>(hop);
    c.spectro.spreading_factor = static_cast<int>(kv.get_int("spectro", "spreading_factor", 7));

    c.dataset.seed = c.dataset_seed();
    c.dataset.fleet = c.fleet == "default" ? default_fleet(c.fleet_spread) : cfo_only_fleet(c.emitters, c.fleet_spread);
    if (c.fleet == "default" && c.emitters >= 2 && c.emitters < 4) c.dataset.fleet.resize(std::size_t(c.emitters));
    c.dataset.low_rate_factors.clear();
    for (double f : c.f_lows)
        if (is_supported_low_rate(f)) c.dataset.low_rate_factors.push_back(factor_for_rate(f));
    c.validate();
    return c;
}

ExperimentConfig load_experiment(const std::string& path, std::optional<std::uint64_t> seed_override) {
    return experiment_from_kv(KvConfig::load(path), seed_override);
}

ExperimentConfig desk_preset(std::uint64_t seed) {
    std::ostringstream os;
    os << "[experiment]\nseed = " << seed << "\noutput_dir = out/desk\n"
       << "[dataset]\nemitters = 4\nper_emitter_count = 200\ntrain_count = 160\nrealizations = 2\n"
       << "[cgan]\nminibatch = 32\nepochs = 100\nmax_batches_per_epoch = 4\nd_lr = 2e-4\n"
       << "[classifier]\nepochs = 30\npatience = 8\n";
    return experiment_from_kv(KvConfig::parse(os.str(), "<desk preset>"));
}

}  // namespace seilab
