#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "seilab/nn/tensor.hpp"
#include "seilab/signal/dataset.hpp"

namespace seilab {

inline constexpr std::size_t kTensorRows = 4;
inline constexpr double kMagnitudeFloor = 1e-12;

/// A preamble as a 4 x W x C real tensor. Storage is channel-major
/// ([C][4][W]) so a batch of these maps directly onto [N, C, 4, W].
///
/// Channel 0 rows are I, Q, ln|z|, arg z. Channel 1, when present, is the
/// label matrix.
struct PreambleTensor {
    std::size_t width = 0;
    std::size_t channels = 1;
    std::vector<double> data;
    int label = 0;
    double snr_db = 0.0;

    PreambleTensor() = default;
    PreambleTensor(std::size_t width, std::size_t channels);

    double& at(std::size_t c, std::size_t r, std::size_t w) { return data[(c * kTensorRows + r) * width + w]; }
    double at(std::size_t c, std::size_t r, std::size_t w) const { return data[(c * kTensorRows + r) * width + w]; }

    /// Channel c as a row-major 4 x W block.
    std::span<double> channel(std::size_t c) { return {data.data() + c * kTensorRows * width, kTensorRows * width}; }
    std::span<const double> channel(std::size_t c) const {
        return {data.data() + c * kTensorRows * width, kTensorRows * width};
    }

    friend bool operator==(const PreambleTensor&, const PreambleTensor&) = default;
};

/// Un-normalized [I, Q, ln|z|, arg z] rows; |z| is floored before the log.
PreambleTensor raw_tensor(const ComplexSequence& seq);

/// Column-wise min-max scaling of channel 0 to [0, 1]. A constant column
/// becomes all zeros.
void normalize_columns(PreambleTensor& t);

/// raw_tensor followed by normalize_columns. Throws on non-finite samples.
PreambleTensor to_tensor(const ComplexSequence& seq, int label = 0, double snr_db = 0.0);
PreambleTensor to_tensor(const PreambleRecord& rec);

/// Channel 0 only.
PreambleTensor strip_label(const PreambleTensor& t);

/// Attaches `m` (row-major 4 x W) as channel 1.
PreambleTensor attach_label(const PreambleTensor& t, std::span<const double> m);

/// Stacks tensors[idx[i]] into an [N, C, 4, W] float batch. All selected
/// tensors must share C and W.
nn::Tensor<float> make_batch(const std::vector<PreambleTensor>& tensors, std::span<const std::size_t> idx);
nn::Tensor<float> make_batch(const std::vector<PreambleTensor>& tensors);

/// Example n of an [N, C, 4, W] batch.
PreambleTensor from_batch(const nn::Tensor<float>& batch, std::size_t n);

}  // namespace seilab
