#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seilab/nn/network.hpp"
#include "seilab/nn/optim.hpp"
#include "seilab/spectro/augment.hpp"
#include "seilab/tensorize/preamble_tensor.hpp"

namespace seilab {

struct ClassifierConfig {
    int num_classes = 4;
    int epochs = 200;
    int patience = 20;               ///< epochs without held-out improvement before stopping
    double holdout_fraction = 0.1;
    std::size_t minibatch = 32;
    nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8, 1e-4};
    bool augment = false;
    SnrRange augment_snr{};

    void validate() const;
};

/// Conv trunk plus a softmax head sized for `width` columns of 4 x W x 1 input.
nn::Network<float> build_classifier(std::size_t width, int num_classes, std::uint64_t seed);

struct TrainedClassifier {
    nn::Network<float> net;
    std::vector<double> train_loss;    ///< per epoch
    std::vector<double> holdout_loss;  ///< per epoch, empty without a holdout
    int best_epoch = 0;
};

/// Trains on labeled signals (labels 1-based). The held-out slice drives early
/// stopping and the best-scoring weights are restored. With augmentation on,
/// every minibatch gets fresh noise before it is tensorized.
TrainedClassifier train_classifier(const std::vector<ComplexSequence>& signals, const std::vector<int>& labels,
                                   const ClassifierConfig& cfg, std::uint64_t seed);

/// Same, on already tensorized inputs (augmentation unavailable).
TrainedClassifier train_classifier(const std::vector<PreambleTensor>& tensors, const ClassifierConfig& cfg,
                                   std::uint64_t seed);

/// Index of the largest probability plus one; ties go to the lowest index.
int classify(std::span<const float> probs);
int classify(nn::Network<float>& net, const PreambleTensor& t);

/// Softmax rows for every tensor, [N, K].
nn::Tensor<float> predict_probs(nn::Network<float>& net, const std::vector<PreambleTensor>& tensors);
std::vector<int> classify_all(nn::Network<float>& net, const std::vector<PreambleTensor>& tensors);

}  // namespace seilab
