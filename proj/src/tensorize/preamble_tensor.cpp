#include "seilab/tensorize/preamble_tensor.hpp"

#include <algorithm>
#include <cmath>

#include "seilab/common.hpp"

namespace seilab {

PreambleTensor::PreambleTensor(std::size_t w, std::size_t c) : width(w), channels(c), data(c * kTensorRows * w, 0.0) {}

PreambleTensor raw_tensor(const ComplexSequence& seq) {
    if (!seq.all_finite()) throw std::invalid_argument("to_tensor: non-finite sample in preamble");
    const auto& z = seq.samples();
    PreambleTensor t(z.size(), 1);
    for (std::size_t w = 0; w < z.size(); ++w) {
        t.at(0, 0, w) = z[w].real();
        t.at(0, 1, w) = z[w].imag();
        t.at(0, 2, w) = std::log(std::max(std::abs(z[w]), kMagnitudeFloor));
        t.at(0, 3, w) = std::arg(z[w]);
    }
    return t;
}

void normalize_columns(PreambleTensor& t) {
    for (std::size_t w = 0; w < t.width; ++w) {
        double lo = t.at(0, 0, w), hi = lo;
        for (std::size_t r = 1; r < kTensorRows; ++r) {
            lo = std::min(lo, t.at(0, r, w));
            hi = std::max(hi, t.at(0, r, w));
        }
        const double range = hi - lo;
        for (std::size_t r = 0; r < kTensorRows; ++r) {
            double& v = t.at(0, r, w);
            if (range > 0.0) {
                // Pin the extremes so the [0, 1] contract survives rounding.
                v = v == lo ? 0.0 : v == hi ? 1.0 : std::clamp((v - lo) / range, 0.0, 1.0);
            } else {
                v = 0.0;
            }
        }
    }
}

PreambleTensor to_tensor(const ComplexSequence& seq, int label, double snr_db) {
    auto t = raw_tensor(seq);
    normalize_columns(t);
    t.label = label;
    t.snr_db = snr_db;
    return t;
}

PreambleTensor to_tensor(const PreambleRecord& rec) { return to_tensor(rec.sequence, rec.emitter_id, rec.snr_db); }

PreambleTensor strip_label(const PreambleTensor& t) {
    PreambleTensor out(t.width, 1);
    std::copy_n(t.data.begin(), kTensorRows * t.width, out.data.begin());
    out.label = t.label;
    out.snr_db = t.snr_db;
    return out;
}

PreambleTensor attach_label(const PreambleTensor& t, std::span<const double> m) {
    if (t.channels != 1) throw std::invalid_argument("attach_label: tensor already has a label channel");
    if (m.size() != kTensorRows * t.width)
        throw std::invalid_argument("attach_label: label matrix has " + std::to_string(m.size()) +
                                    " values, tensor width " + std::to_string(t.width) + " needs " +
                                    std::to_string(kTensorRows * t.width));
    PreambleTensor out(t.width, 2);
    std::copy(t.data.begin(), t.data.end(), out.data.begin());
    std::copy(m.begin(), m.end(), out.data.begin() + static_cast<std::ptrdiff_t>(kTensorRows * t.width));
    out.label = t.label;
    out.snr_db = t.snr_db;
    return out;
}

nn::Tensor<float> make_batch(const std::vector<PreambleTensor>& tensors, std::span<const std::size_t> idx) {
    if (idx.empty()) throw std::invalid_argument("make_batch: empty selection");
    const auto& first = tensors.at(idx[0]);
    const std::size_t per = first.data.size();
    nn::Tensor<float> out({idx.size(), first.channels, kTensorRows, first.width});
    for (std::size_t n = 0; n < idx.size(); ++n) {
        const auto& t = tensors.at(idx[n]);
        if (t.channels != first.channels || t.width != first.width)
            throw std::invalid_argument("make_batch: mixed tensor shapes in one batch");
        std::transform(t.data.begin(), t.data.end(), out.data() + n * per, [](double v) { return float(v); });
    }
    return out;
}

nn::Tensor<float> make_batch(const std::vector<PreambleTensor>& tensors) {
    std::vector<std::size_t> idx(tensors.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return make_batch(tensors, idx);
}

PreambleTensor from_batch(const nn::Tensor<float>& batch, std::size_t n) {
    if (batch.rank() != 4 || batch.dim(2) != kTensorRows || n >= batch.dim(0))
        throw std::invalid_argument("from_batch: expected [N, C, 4, W], got " + nn::shape_str(batch.shape()));
    PreambleTensor t(batch.dim(3), batch.dim(1));
    const float* src = batch.data() + n * t.data.size();
    std::copy(src, src + t.data.size(), t.data.begin());
    return t;
}

}  // namespace seilab
