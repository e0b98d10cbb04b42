#include "seilab/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "seilab/common.hpp"

namespace seilab {

TrainingPairs cgan_training_pairs(const Dataset& data, int factor, const std::vector<double>& snrs) {
    auto it = data.train_low.find(factor);
    if (it == data.train_low.end())
        throw PrerequisiteError("dataset has no low-rate training copies for decimation factor " +
                                std::to_string(factor));
    TrainingPairs p;
    for (std::size_t i = 0; i < data.train_high.size(); ++i) {
        const double s = data.train_high[i].snr_db;
        if (!snrs.empty() && std::none_of(snrs.begin(), snrs.end(), [&](double g) { return std::abs(g - s) < 1e-9; }))
            continue;
        p.high.push_back(data.train_high[i]);
        p.low.push_back(it->second[i]);
    }
    return p;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress) {
    auto say = [&](const std::string& s) {
        if (progress) progress(s);
    };
    PipelineResult out;
    say("generating dataset");
    out.data = build_dataset_in_memory(cfg.dataset);

    const bool need_gan = std::find(cfg.methods.begin(), cfg.methods.end(), Method::Cgan) != cfg.methods.end();
    if (need_gan)
        for (double f : cfg.f_lows) {
            char mhz[32];
            std::snprintf(mhz, sizeof mhz, "%g", f / 1e6);
            say(std::string("training cGAN at ") + mhz + " MHz");
            auto pairs = cgan_training_pairs(out.data, factor_for_rate(f), cfg.cgan_train_snrs);
            out.cgans.emplace(f, train_cgan(pairs.high, pairs.low, cfg.cgan_for(f)));
        }

    auto cmp = cfg.comparison();
    cmp.progress = progress;
    out.reports = run_comparison(out.data, cfg.f_lows, cfg.methods, cmp, [&](double f) -> TrainedGenerator& {
        auto it = out.cgans.find(f);
        if (it == out.cgans.end()) throw PrerequisiteError("no cGAN trained for this rate");
        return it->second.generator;
    });
    const auto hash = cfg.hash();
    for (const auto& r : out.reports) out.report_csvs[report_file_name(r)] = report_csv(r, hash);
    out.plotdata = plotdata_csv(out.reports, hash);
    return out;
}

}  // namespace seilab
