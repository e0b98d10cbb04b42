#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seilab/config/experiment_config.hpp"

namespace seilab {

/// Full-rate training records and their decimated twins restricted to the
/// given SNRs (all when empty).
struct TrainingPairs {
    std::vector<PreambleRecord> high;
    std::vector<PreambleRecord> low;
};
TrainingPairs cgan_training_pairs(const Dataset& data, int factor, const std::vector<double>& snrs);

struct PipelineResult {
    Dataset data;
    std::map<double, CganResult> cgans;  ///< keyed by f_low
    std::vector<EvalReport> reports;
    std::map<std::string, std::string> report_csvs;  ///< file name -> contents
    std::string plotdata;
};

/// generate -> train every needed cGAN -> evaluate, entirely in memory. The
/// result is a pure function of the config.
PipelineResult run_pipeline(const ExperimentConfig& cfg, const std::function<void(const std::string&)>& progress = {});

}  // namespace seilab
