#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace seilab {

inline constexpr std::size_t kEmbeddingDim = 50;
inline constexpr std::array<std::size_t, 4> kSupportedWidths{40, 80, 160, 320};

/// Maps an emitter label to a 4 x W conditioning matrix: a length-50
/// embedding followed by a linear fully-connected layer, one weight set per
/// supported width. Read-only after construction.
class LabelEmbedder {
public:
    LabelEmbedder() = default;
    /// Embedding rows are uniform(-1, 1); FC weights are Glorot-uniform with
    /// zero bias. Every table has its own derived seed.
    LabelEmbedder(int num_labels, std::uint64_t seed);

    int num_labels() const { return num_labels_; }

    /// Embedding vector for a 1-based label.
    std::span<const double> embedding(int label) const;

    /// FC output reshaped row-major to 4 x W; length 4 * W.
    std::vector<double> label_channel(int label, std::size_t width) const;

    void write(std::ostream& out) const;
    static LabelEmbedder read(std::istream& in);

    friend bool operator==(const LabelEmbedder&, const LabelEmbedder&) = default;

private:
    struct Fc {
        std::vector<double> weight;  // kEmbeddingDim x (4 * W), row-major
        std::vector<double> bias;
        friend bool operator==(const Fc&, const Fc&) = default;
    };
    const Fc& fc_for(std::size_t width) const;

    int num_labels_ = 0;
    std::vector<double> table_;  // num_labels x kEmbeddingDim
    std::array<Fc, kSupportedWidths.size()> fc_{};
};

bool is_supported_width(std::size_t width);

}  // namespace seilab
