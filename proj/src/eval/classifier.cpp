#include "seilab/eval/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "seilab/cgan/cgan.hpp"
#include "seilab/common.hpp"
#include "seilab/nn/loss.hpp"
#include "seilab/rng.hpp"

namespace seilab {

namespace {

constexpr std::size_t kPredictChunk = 512;

double holdout_loss(nn::Network<float>& net, const std::vector<PreambleTensor>& hold) {
    if (hold.empty()) return 0.0;
    const auto probs = predict_probs(net, hold);
    std::vector<int> labels;
    for (const auto& t : hold) labels.push_back(t.label - 1);
    return nn::categorical_cross_entropy(probs, labels).loss;
}

TrainedClassifier train_impl(const std::vector<PreambleTensor>* fixed, const std::vector<ComplexSequence>* signals,
                             const std::vector<int>& labels, const ClassifierConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const std::size_t n = labels.size();
    if (n == 0) throw std::invalid_argument("train_classifier: empty training set");
    for (int l : labels)
        if (l < 1 || l > cfg.num_classes)
            throw std::invalid_argument("train_classifier: label " + std::to_string(l) + " outside 1.." +
                                        std::to_string(cfg.num_classes));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng split_rng(derive_seed(seed, {1}));
    split_rng.shuffle(order.begin(), order.end());
    std::size_t n_hold = static_cast<std::size_t>(std::floor(cfg.holdout_fraction * double(n)));
    if (n - n_hold < 1) n_hold = 0;
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_hold), order.end());
    std::sort(train_idx.begin(), train_idx.end());

    auto tensor_of = [&](std::size_t i) {
        if (fixed) return (*fixed)[i];
        return to_tensor((*signals)[i], labels[i]);
    };
    std::vector<PreambleTensor> hold;
    for (std::size_t k = 0; k < n_hold; ++k) hold.push_back(tensor_of(order[k]));
    std::vector<PreambleTensor> cache;
    if (!cfg.augment) {
        cache.resize(n);
        for (auto i : train_idx) cache[i] = tensor_of(i);
    }

    const std::size_t width = fixed ? (*fixed)[0].width : (*signals)[0].size();
    TrainedClassifier out{build_classifier(width, cfg.num_classes, derive_seed(seed, {2})), {}, {}, 0};
    auto& net = out.net;
    nn::AdamState<float> opt(cfg.adam, net.parameters());
    std::optional<nn::Network<float>> best;
    double best_loss = std::numeric_limits<double>::infinity();
    int since_best = 0;

    const std::size_t bs = std::min(cfg.minibatch, train_idx.size());
    std::vector<std::size_t> perm = train_idx;
    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng rng(derive_seed(seed, {3, static_cast<std::uint64_t>(epoch)}));
        rng.shuffle(perm.begin(), perm.end());
        double loss_sum = 0.0;
        std::size_t steps = 0;
        for (std::size_t start = 0; start + bs <= perm.size(); start += bs, ++steps) {
            std::vector<PreambleTensor> batch;
            std::vector<int> y;
            if (cfg.augment) {
                std::vector<ComplexSequence> seqs;
                for (std::size_t k = start; k < start + bs; ++k) seqs.push_back((*signals)[perm[k]]);
                auto noisy = online_augment(seqs, cfg.augment_snr, augment_seed(seed, epoch, steps));
                for (std::size_t k = 0; k < bs; ++k) batch.push_back(to_tensor(noisy[k], labels[perm[start + k]]));
            } else {
                for (std::size_t k = start; k < start + bs; ++k) batch.push_back(cache[perm[k]]);
            }
            for (const auto& t : batch) y.push_back(t.label - 1);
            net.zero_grad();
            const auto& probs = net.forward(make_batch(batch));
            const auto ce = nn::categorical_cross_entropy(probs, y);
            net.backward_from_logits(ce.grad_logits);
            nn::adam_step(opt, net.parameters());
            loss_sum += ce.loss;
        }
        if (!std::isfinite(loss_sum)) throw NumericError("train_classifier: non-finite loss at epoch " +
                                                         std::to_string(epoch));
        out.train_loss.push_back(loss_sum / double(std::max<std::size_t>(steps, 1)));
        if (hold.empty()) {
            out.best_epoch = epoch;
            continue;
        }
        const double hl = holdout_loss(net, hold);
        out.holdout_loss.push_back(hl);
        if (hl < best_loss) {
            best_loss = hl;
            best = net;
            out.best_epoch = epoch;
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            break;
        }
    }
    if (best) net.copy_parameters_from(*best);
    return out;
}

}  // namespace

void ClassifierConfig::validate() const {
    if (num_classes < 2) throw ConfigError("classifier: num_classes must be at least 2");
    if (epochs < 1) throw ConfigError("classifier: epochs must be at least 1");
    if (patience < 1) throw ConfigError("classifier: patience must be at least 1");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
        throw ConfigError("classifier: holdout_fraction must lie in [0, 1)");
    if (minibatch < 1) throw ConfigError("classifier: minibatch must be at least 1");
    if (!(adam.lr > 0.0) || adam.l2 < 0.0) throw ConfigError("classifier: lr must be positive and l2 non-negative");
}

nn::Network<float> build_classifier(std::size_t width, int num_classes, std::uint64_t seed) {
    return nn::Network<float>({1, kTensorRows, width},
                              cnn_trunk_specs(static_cast<std::uint32_t>(num_classes), nn::LayerKind::Softmax), seed);
}

TrainedClassifier train_classifier(const std::vector<ComplexSequence>& signals, const std::vector<int>& labels,
                                   const ClassifierConfig& cfg, std::uint64_t seed) {
    if (signals.size() != labels.size()) throw std::invalid_argument("train_classifier: one label per signal");
    return train_impl(nullptr, &signals, labels, cfg, seed);
}

TrainedClassifier train_classifier(const std::vector<PreambleTensor>& tensors, const ClassifierConfig& cfg,
                                   std::uint64_t seed) {
    if (cfg.augment) throw ConfigError("train_classifier: augmentation needs signals, not tensors");
    std::vector<int> labels;
    for (const auto& t : tensors) {
        if (t.channels != 1 || t.width != tensors[0].width)
            throw std::invalid_argument("train_classifier: tensors must all be 4 x W x 1 with one width");
        labels.push_back(t.label);
    }
    return train_impl(&tensors, nullptr, labels, cfg, seed);
}

int classify(std::span<const float> probs) {
    if (probs.empty()) throw std::invalid_argument("classify: empty probability vector");
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.size(); ++j)
        if (probs[j] > probs[best]) best = j;
    return static_cast<int>(best) + 1;
}

int classify(nn::Network<float>& net, const PreambleTensor& t) { return classify_all(net, {t}).front(); }

nn::Tensor<float> predict_probs(nn::Network<float>& net, const std::vector<PreambleTensor>& tensors) {
    const auto& in = net.input_shape();
    for (const auto& t : tensors)
        if (t.channels != in[0] || t.width != in[2])
            throw std::invalid_argument("classify: tensor 4 x " + std::to_string(t.width) + " x " +
                                        std::to_string(t.channels) + " does not match classifier input " +
                                        nn::shape_str(in));
    const std::size_t k = net.output_shape()[0];
    nn::Tensor<float> out({tensors.size(), k});
    for (std::size_t start = 0; start < tensors.size(); start += kPredictChunk) {
        const std::size_t end = std::min(tensors.size(), start + kPredictChunk);
        std::vector<std::size_t> idx;
        for (std::size_t i = start; i < end; ++i) idx.push_back(i);
        const auto& p = net.forward(make_batch(tensors, idx));
        std::copy_n(p.data(), p.size(), out.data() + start * k);
    }
    return out;
}

std::vector<int> classify_all(nn::Network<float>& net, const std::vector<PreambleTensor>& tensors) {
    if (tensors.empty()) return {};
    const auto probs = predict_probs(net, tensors);
    const std::size_t k = probs.dim(1);
    std::vector<int> out;
    for (std::size_t i = 0; i < tensors.size(); ++i) out.push_back(classify({probs.data() + i * k, k}));
    return out;
}

}  // namespace seilab
