#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seilab/cgan/cgan.hpp"
#include "seilab/config/kv_config.hpp"
#include "seilab/eval/classifier.hpp"
#include "seilab/eval/comparison.hpp"
#include "seilab/eval/report.hpp"
#include "seilab/signal/dataset.hpp"
#include "seilab/spectro/spectrogram.hpp"

namespace seilab {

/// Everything one generate -> train -> evaluate run depends on.
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string output_dir = "out";

    // [dataset]
    std::string fleet = "default";  ///< "default" or "cfo_only"
    int emitters = 4;
    double fleet_spread = 1.0;      ///< default fleet: impairment scale; cfo_only: CFO spacing in Hz
    DatasetManifest dataset;        ///< fleet and seed are filled in from the fields above

    // [cgan]
    CganConfig cgan;                ///< f_low and seed are set per run
    std::vector<double> cgan_train_snrs;  ///< empty: every grid SNR

    // [classifier]
    ClassifierConfig classifier;
    TrainSnrMap snr_map = TrainSnrMap::defaults();

    // [evaluation]
    std::vector<Method> methods{Method::Cgan, Method::CnnOnly, Method::Lai, Method::Csi, Method::FullRate};
    std::vector<double> f_lows{2.5e6, 5e6, 10e6};
    Conditioning conditioning = Conditioning::CandidateSweep;

    // [augment]
    bool augment = false;
    SnrRange augment_snr{};

    // [spectro]
    SpectroConfig spectro{};

    /// Cross-field checks; throws ConfigError naming the field.
    void validate() const;

    /// Deterministic text form of every field; the config hash is taken over it.
    std::string canonical_text() const;
    std::string hash() const { return fnv1a_hex(canonical_text()); }

    std::uint64_t dataset_seed() const;
    std::uint64_t comparison_seed() const;
    CganConfig cgan_for(double f_low_hz) const;
    ComparisonConfig comparison() const;
};

/// Builds a config from parsed text. `seed_override` replaces [experiment] seed.
ExperimentConfig experiment_from_kv(const KvConfig& kv, std::optional<std::uint64_t> seed_override = {});
ExperimentConfig load_experiment(const std::string& path, std::optional<std::uint64_t> seed_override = {});

/// The desk-scale preset: 4 emitters, 200 preambles each, 100 cGAN epochs.
ExperimentConfig desk_preset(std::uint64_t seed);

}  // namespace seilab
