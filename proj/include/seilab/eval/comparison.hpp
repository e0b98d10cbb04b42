#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "seilab/cgan/cgan.hpp"
#include "seilab/eval/classifier.hpp"
#include "seilab/eval/report.hpp"
#include "seilab/signal/dataset.hpp"

namespace seilab {

/// How the generator is conditioned when upsampling test preambles.
enum class Conditioning {
    TrueLabel,       ///< the record's own label
    CandidateSweep,  ///< every candidate label; keep the one the classifier confirms most strongly
};

std::string conditioning_name(Conditioning c);
Conditioning parse_conditioning(const std::string& s);

struct ComparisonConfig {
    TrainSnrMap snr_map = TrainSnrMap::defaults();
    ClassifierConfig classifier{};
    std::uint64_t seed = 0;
    Conditioning conditioning = Conditioning::CandidateSweep;
    /// Optional progress sink.
    std::function<void(const std::string&)> progress;
};

/// Supplies the trained generator for a collection rate; throws
/// PrerequisiteError when none exists.
using GeneratorProvider = std::function<TrainedGenerator&(double f_low_hz)>;

/// Supplies a trained classifier for (input width, training SNR).
using ClassifierProvider = std::function<nn::Network<float>&(std::size_t width, double train_snr)>;

struct ClassifierKey {
    std::size_t width = 0;
    double train_snr = 0.0;
    friend bool operator==(const ClassifierKey&, const ClassifierKey&) = default;
};

/// Every classifier the given methods and rates need, in first-use order.
std::vector<ClassifierKey> required_classifiers(const std::vector<double>& f_lows, const std::vector<Method>& methods,
                                               const TrainSnrMap& snr_map);

/// Trains the comparison classifier for one key: full-rate training records
/// for width 320, the matching decimated copies otherwise.
TrainedClassifier train_comparison_classifier(const Dataset& data, std::size_t width, double train_snr,
                                              const ComparisonConfig& cfg);

/// Runs every (method, f_low) pair plus the full-rate reference when
/// requested. Without a provider, classifiers are trained once per (width,
/// training SNR) and shared by all methods that use that width.
std::vector<EvalReport> run_comparison(const Dataset& data, const std::vector<double>& f_lows,
                                       const std::vector<Method>& methods, const ComparisonConfig& cfg,
                                       const GeneratorProvider& generators, const ClassifierProvider& classifiers = {});

/// Upsampled (or resampled) 4 x 320 x 1 tensors for test records decimated to
/// f_low, by interpolation method.
std::vector<PreambleTensor> interpolated_tensors(const std::vector<PreambleRecord>& test, double f_low_hz,
                                                 Method method);

/// Classifies generator outputs under the chosen conditioning policy.
std::vector<int> classify_generated(TrainedGenerator& g, nn::Network<float>& classifier,
                                    const std::vector<PreambleTensor>& low, Conditioning policy);

}  // namespace seilab
