#include "seilab/tensorize/label_embedder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "seilab/common.hpp"
#include "seilab/nn/checkpoint.hpp"
#include "seilab/rng.hpp"
#include "seilab/tensorize/preamble_tensor.hpp"

namespace seilab {

namespace {

std::size_t width_slot(std::size_t width) {
    for (std::size_t i = 0; i < kSupportedWidths.size(); ++i)
        if (kSupportedWidths[i] == width) return i;
    throw std::invalid_argument("label_channel: unsupported width " + std::to_string(width) +
                                " (expected 40, 80, 160 or 320)");
}

}  // namespace

bool is_supported_width(std::size_t width) {
    return std::find(kSupportedWidths.begin(), kSupportedWidths.end(), width) != kSupportedWidths.end();
}

LabelEmbedder::LabelEmbedder(int num_labels, std::uint64_t seed) : num_labels_(num_labels) {
    if (num_labels < 1) throw std::invalid_argument("LabelEmbedder: need at least one label");
    Rng table_rng(derive_seed(seed, {0}));
    table_.resize(static_cast<std::size_t>(num_labels) * kEmbeddingDim);
    for (auto& v : table_) v = table_rng.uniform(-1.0, 1.0);
    for (std::size_t s = 0; s < kSupportedWidths.size(); ++s) {
        const std::size_t out = kTensorRows * kSupportedWidths[s];
        const double limit = std::sqrt(6.0 / double(kEmbeddingDim + out));
        Rng rng(derive_seed(seed, {1, kSupportedWidths[s]}));
        fc_[s].weight.resize(kEmbeddingDim * out);
        for (auto& v : fc_[s].weight) v = rng.uniform(-limit, limit);
        fc_[s].bias.assign(out, 0.0);
    }
}

std::span<const double> LabelEmbedder::embedding(int label) const {
    if (label < 1 || label > num_labels_)
        throw std::invalid_argument("label_channel: unknown label " + std::to_string(label) + " (valid 1.." +
                                    std::to_string(num_labels_) + ")");
    return {table_.data() + std::size_t(label - 1) * kEmbeddingDim, kEmbeddingDim};
}

const LabelEmbedder::Fc& LabelEmbedder::fc_for(std::size_t width) const { return fc_[width_slot(width)]; }

std::vector<double> LabelEmbedder::label_channel(int label, std::size_t width) const {
    const auto e = embedding(label);
    const auto& fc = fc_for(width);
    std::vector<double> out = fc.bias;
    for (std::size_t k = 0; k < kEmbeddingDim; ++k) {
        const double* row = fc.weight.data() + k * out.size();
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += e[k] * row[j];
    }
    return out;
}

void LabelEmbedder::write(std::ostream& out) const {
    out.write("SEIL", 4);
    nn::write_u16(out, 1);
    nn::write_u32(out, static_cast<std::uint32_t>(num_labels_));
    for (double v : table_) nn::write_f64(out, v);
    for (const auto& fc : fc_) {
        for (double v : fc.weight) nn::write_f64(out, v);
        for (double v : fc.bias) nn::write_f64(out, v);
    }
}

LabelEmbedder LabelEmbedder::read(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SEIL", 4) != 0) throw IoError("label embedder: bad magic");
    if (nn::read_u16(in) != 1) throw IoError("label embedder: unsupported version");
    LabelEmbedder e;
    e.num_labels_ = static_cast<int>(nn::read_u32(in));
    if (e.num_labels_ < 1 || e.num_labels_ > 65535) throw IoError("label embedder: implausible label count");
    e.table_.resize(std::size_t(e.num_labels_) * kEmbeddingDim);
    for (auto& v : e.table_) v = nn::read_f64(in);
    for (std::size_t s = 0; s < kSupportedWidths.size(); ++s) {
        const std::size_t out = kTensorRows * kSupportedWidths[s];
        e.fc_[s].weight.resize(kEmbeddingDim * out);
        e.fc_[s].bias.resize(out);
        for (auto& v : e.fc_[s].weight) v = nn::read_f64(in);
        for (auto& v : e.fc_[s].bias) v = nn::read_f64(in);
    }
    return e;
}

}  // namespace seilab
