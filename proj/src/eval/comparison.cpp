#include "seilab/eval/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "seilab/common.hpp"
#include "seilab/resample/interpolate.hpp"
#include "seilab/rng.hpp"
#include "seilab/signal/fir.hpp"
#include "seilab/signal/preamble.hpp"

namespace seilab {

namespace {

bool same_snr(double a, double b) { return std::abs(a - b) < 1e-9; }

std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<Outcome> outcomes_of(const std::vector<PreambleRecord>& test, const std::vector<int>& predicted) {
    std::vector<Outcome> out;
    out.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) out.push_back({test[i].emitter_id, test[i].snr_db, predicted[i]});
    return out;
}

std::vector<PreambleTensor> decimated_tensors(const std::vector<PreambleRecord>& test, int factor) {
    std::vector<PreambleTensor> out;
    out.reserve(test.size());
    for (const auto& r : test) out.push_back(to_tensor(decimate(r.sequence, factor), r.emitter_id, r.snr_db));
    return out;
}

}  // namespace

std::string conditioning_name(Conditioning c) {
    return c == Conditioning::TrueLabel ? "true_label" : "candidate_sweep";
}

Conditioning parse_conditioning(const std::string& s) {
    if (s == "true_label") return Conditioning::TrueLabel;
    if (s == "candidate_sweep") return Conditioning::CandidateSweep;
    throw ConfigError("unknown conditioning '" + s + "' (expected true_label or candidate_sweep)");
}

std::vector<PreambleTensor> interpolated_tensors(const std::vector<PreambleRecord>& test, double f_low_hz,
                                                 Method method) {
    if (method != Method::Lai && method != Method::Csi)
        throw std::invalid_argument("interpolated_tensors: method must be lai or csi");
    const int factor = factor_for_rate(f_low_hz);
    std::vector<PreambleTensor> out;
    out.reserve(test.size());
    for (const auto& r : test) {
        const auto low = decimate(r.sequence, factor);
        const auto up = method == Method::Lai ? lai_upsample(low, factor) : csi_upsample(low, factor);
        out.push_back(to_tensor(up, r.emitter_id, r.snr_db));
    }
    return out;
}

std::vector<int> classify_generated(TrainedGenerator& g, nn::Network<float>& classifier,
                                    const std::vector<PreambleTensor>& low, Conditioning policy) {
    if (low.empty()) return {};
    if (policy == Conditioning::TrueLabel) {
        std::vector<int> labels;
        for (const auto& t : low) labels.push_back(t.label);
        return classify_all(classifier, g.upsample(low, labels));
    }
    const int classes = g.embedder().num_labels();
    std::vector<double> best(low.size(), -1.0);
    std::vector<int> pick(low.size(), 1);
    for (int y = 1; y <= classes; ++y) {
        const auto probs = predict_probs(classifier, g.upsample(low, std::vector<int>(low.size(), y)));
        const std::size_t k = probs.dim(1);
        if (static_cast<std::size_t>(y) > k)
            throw std::invalid_argument("classify_generated: classifier has fewer classes than the embedder");
        for (std::size_t i = 0; i < low.size(); ++i) {
            const double p = probs[i * k + static_cast<std::size_t>(y - 1)];
            if (p > best[i]) {
                best[i] = p;
                pick[i] = y;
            }
        }
    }
    return pick;
}

std::vector<ClassifierKey> required_classifiers(const std::vector<double>& f_lows, const std::vector<Method>& methods,
                                               const TrainSnrMap& snr_map) {
    std::vector<ClassifierKey> out;
    auto add = [&](std::size_t width) {
        for (double s : snr_map.train_snrs()) {
            ClassifierKey k{width, s};
            if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
        }
    };
    for (Method m : methods) {
        if (m == Method::CnnOnly) {
            for (double f : f_lows) add(kHighRateWidth / std::size_t(factor_for_rate(f)));
        } else if (m == Method::FullRate || !f_lows.empty()) {
            add(kHighRateWidth);
        }
    }
    return out;
}

TrainedClassifier train_comparison_classifier(const Dataset& data, std::size_t width, double train_snr,
                                              const ComparisonConfig& cfg) {
    const std::vector<PreambleRecord>* src = &data.train_high;
    if (width != kHighRateWidth) {
        if (width == 0 || kHighRateWidth % width != 0)
            throw std::invalid_argument("train_comparison_classifier: unsupported width " + std::to_string(width));
        const int factor = static_cast<int>(kHighRateWidth / width);
        auto it = data.train_low.find(factor);
        if (it == data.train_low.end())
            throw PrerequisiteError("dataset lacks low-rate training copies for factor " + std::to_string(factor));
        src = &it->second;
    }
    std::vector<ComplexSequence> sig;
    std::vector<int> labels;
    for (const auto& r : *src)
        if (same_snr(r.snr_db, train_snr)) {
            sig.push_back(r.sequence);
            labels.push_back(r.emitter_id);
        }
    if (sig.empty())
        throw ConfigError("no training records at " + short_num(train_snr) +
                          " dB; the SNR map must point at grid values");
    const auto snr_key = static_cast<std::uint64_t>(std::lround(train_snr * 1000));
    return train_classifier(sig, labels, cfg.classifier, derive_seed(cfg.seed, {width, snr_key}));
}

std::vector<EvalReport> run_comparison(const Dataset& data, const std::vector<double>& f_lows,
                                       const std::vector<Method>& methods, const ComparisonConfig& cfg,
                                       const GeneratorProvider& generators, const ClassifierProvider& classifiers) {
    const auto& grid = data.manifest.snr_grid;
    std::vector<int> emitters;
    for (const auto& e : data.manifest.fleet) emitters.push_back(e.emitter_id);
    for (double s : grid) cfg.snr_map.train_snr(s);
    if (data.test.empty()) throw PrerequisiteError("run_comparison: the dataset has no test records");
    auto say = [&](const std::string& msg) {
        if (cfg.progress) cfg.progress(msg);
    };

    std::map<std::pair<std::size_t, long>, nn::Network<float>> trained;
    auto classifier_for = [&](std::size_t width, double train_snr) -> nn::Network<float>& {
        if (classifiers) return classifiers(width, train_snr);
        const std::pair<std::size_t, long> key{width, std::lround(train_snr * 1000)};
        if (auto it = trained.find(key); it != trained.end()) return it->second;
        say("training classifier width=" + std::to_string(width) + " snr=" + short_num(train_snr));
        return trained.emplace(key, train_comparison_classifier(data, width, train_snr, cfg).net).first->second;
    };

    std::map<long, std::vector<PreambleRecord>> test_by_snr;
    for (const auto& r : data.test) test_by_snr[std::lround(r.snr_db * 1000)].push_back(r);

    auto run = [&](Method m, double f_low) {
        say("evaluating " + method_name(m) + " at " + short_num(f_low / 1e6) + " MHz");
        std::vector<Outcome> all;
        for (double s : grid) {
            const auto& test = test_by_snr[std::lround(s * 1000)];
            if (test.empty()) continue;
            const double train_snr = cfg.snr_map.train_snr(s);
            std::vector<int> pred;
            switch (m) {
                case Method::FullRate: {
                    std::vector<PreambleTensor> t;
                    for (const auto& r : test) t.push_back(to_tensor(r));
                    pred = classify_all(classifier_for(kHighRateWidth, train_snr), t);
                    break;
                }
                case Method::Lai:
                case Method::Csi:
                    pred = classify_all(classifier_for(kHighRateWidth, train_snr), interpolated_tensors(test, f_low, m));
                    break;
                case Method::CnnOnly: {
                    const int factor = factor_for_rate(f_low);
                    pred = classify_all(classifier_for(kHighRateWidth / std::size_t(factor), train_snr),
                                        decimated_tensors(test, factor));
                    break;
                }
                case Method::Cgan: {
                    auto& g = generators(f_low);
                    pred = classify_generated(g, classifier_for(kHighRateWidth, train_snr),
                                              decimated_tensors(test, factor_for_rate(f_low)), cfg.conditioning);
                    break;
                }
            }
            auto o = outcomes_of(test, pred);
            all.insert(all.end(), o.begin(), o.end());
        }
        return evaluate(all, m, m == Method::FullRate ? kHighRateHz : f_low, grid, emitters);
    };

    std::vector<EvalReport> reports;
    for (double f : f_lows) {
        factor_for_rate(f);
        for (Method m : methods)
            if (m != Method::FullRate) reports.push_back(run(m, f));
    }
    if (std::find(methods.begin(), methods.end(), Method::FullRate) != methods.end())
        reports.push_back(run(Method::FullRate, kHighRateHz));
    return reports;
}

}  // namespace seilab
