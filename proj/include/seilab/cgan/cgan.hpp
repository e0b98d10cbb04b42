#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seilab/nn/loss.hpp"
#include "seilab/nn/network.hpp"
#include "seilab/nn/optim.hpp"
#include "seilab/signal/dataset.hpp"
#include "seilab/spectro/augment.hpp"
#include "seilab/tensorize/label_embedder.hpp"
#include "seilab/tensorize/preamble_tensor.hpp"

namespace seilab {

inline constexpr std::size_t kHighRateWidth = 320;

/// Decimation factor for a supported collection rate (2.5, 5 or 10 MHz).
int factor_for_rate(double f_low_hz);
bool is_supported_low_rate(double f_low_hz);

struct CganConfig {
    double f_low_hz = 5e6;
    std::size_t minibatch = 256;
    int epochs = 1000;
    int k = 1;                          ///< discriminator steps per generator step
    double equilibrium_eps = 0.02;      ///< stop once every D output of an epoch is within eps of 0.5
    std::uint64_t seed = 0;
    nn::AdamConfig d_adam{};
    double g_lr = 1e-2;
    double g_momentum = 0.9;
    double l1_weight = 0.0;             ///< optional reconstruction term, off by default
    nn::GeneratorLoss g_loss = nn::GeneratorLoss::NonSaturating;
    std::size_t max_batches_per_epoch = 0;  ///< 0 = full pass over the training set
    bool augment = false;
    SnrRange augment_snr{};
    int num_labels = 4;

    void validate(std::size_t train_size) const;
};

/// Layer stack of the generator for one collection rate: a convolutional
/// autoencoder taking [2, 4, W] to [2, 4, 320].
std::vector<nn::LayerSpec> generator_specs(double f_low_hz);
nn::Network<float> build_generator(double f_low_hz, std::uint64_t seed);

/// Index of the generator's code layer (the narrowest activation).
std::size_t generator_bottleneck_layer(double f_low_hz);

/// Conv/pool trunk shared by the discriminator and the classifiers, ending
/// in `head` dense units and the given activation.
std::vector<nn::LayerSpec> cnn_trunk_specs(std::uint32_t head, nn::LayerKind activation);
nn::Network<float> build_discriminator(std::uint64_t seed);

struct EpochLog {
    int epoch = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double mean_d_real = 0.0;
    double mean_d_fake = 0.0;
    double max_dev = 0.0;   ///< largest |D - 0.5| seen during the epoch
    bool equilibrium = false;
};

std::string training_log_header();
std::string training_log_row(const EpochLog& row);

class TrainedGenerator {
public:
    TrainedGenerator(nn::Network<float> generator, double f_low_hz, LabelEmbedder embedder);

    double f_low_hz() const { return f_low_hz_; }
    const LabelEmbedder& embedder() const { return embedder_; }
    nn::Network<float>& network() { return generator_; }

    /// Tensorize, attach the label channel, run the generator, drop channel 1.
    /// Returns a 4 x 320 x 1 tensor.
    PreambleTensor upsample(const ComplexSequence& low, int label);

    /// Batched form on already tensorized low-rate inputs (C = 1).
    std::vector<PreambleTensor> upsample(const std::vector<PreambleTensor>& low, const std::vector<int>& labels);

    /// `tag` is stored verbatim in the header (the CLI puts the config hash there).
    void save(const std::filesystem::path& path, const std::string& tag = "");
    static TrainedGenerator load(const std::filesystem::path& path);
    static std::string stored_tag(const std::filesystem::path& path);

private:
    nn::Network<float> generator_;
    double f_low_hz_;
    LabelEmbedder embedder_;
};

struct CganRunOptions {
    /// When set, the full training state is written here after every epoch and
    /// training resumes from it if the file exists.
    std::optional<std::filesystem::path> state_file;
    /// Stop (as if interrupted) after this many epochs of this invocation; 0 = never.
    int interrupt_after = 0;
    std::function<void(const EpochLog&)> on_epoch;
};

struct CganResult {
    TrainedGenerator generator;
    std::vector<EpochLog> log;
    bool completed = false;  ///< false when interrupted
};

/// Alternating adversarial training. high[i] and low[i] must be the full-rate
/// record and its decimated twin.
CganResult train_cgan(const std::vector<PreambleRecord>& high, const std::vector<PreambleRecord>& low,
                      const CganConfig& cfg, const CganRunOptions& opts = {});

}  // namespace seilab
