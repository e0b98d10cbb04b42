#include "seilab/cgan/cgan.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seilab/common.hpp"
#include "seilab/nn/checkpoint.hpp"
#include "seilab/rng.hpp"
#include "seilab/signal/fir.hpp"
#include "seilab/signal/preamble.hpp"

namespace seilab {

using nn::LayerKind;
using nn::LayerSpec;
using nn::Tensor;

namespace {

constexpr std::uint32_t kDecoderChannels = 8;
constexpr std::size_t kInferenceChunk = 256;

struct Prepared {
    std::vector<PreambleTensor> high;  // C = 2, width 320
    std::vector<PreambleTensor> low;   // C = 2, width W
};

Prepared prepare(const std::vector<ComplexSequence>& high, const std::vector<ComplexSequence>& low,
                 const std::vector<int>& labels, const LabelEmbedder& emb) {
    Prepared p;
    p.high.reserve(high.size());
    p.low.reserve(low.size());
    for (std::size_t i = 0; i < high.size(); ++i) {
        auto h = to_tensor(high[i], labels[i]);
        auto l = to_tensor(low[i], labels[i]);
        p.high.push_back(attach_label(h, emb.label_channel(labels[i], h.width)));
        p.low.push_back(attach_label(l, emb.label_channel(labels[i], l.width)));
    }
    return p;
}

/// [B, 2, 4, 320] discriminator input: generator channel 0 beside the real
/// batch's label channel.
Tensor<float> fake_input(const Tensor<float>& g_out, const Tensor<float>& real) {
    Tensor<float> out = real;
    const std::size_t plane = kTensorRows * real.dim(3);
    for (std::size_t n = 0; n < real.dim(0); ++n)
        std::copy_n(g_out.data() + n * 2 * plane, plane, out.data() + n * 2 * plane);
    return out;
}

struct TrainingState {
    int next_epoch = 1;
    nn::Network<float> g;
    nn::Network<float> d;
    nn::AdamState<float> d_opt;
    nn::MomentumSgdState<float> g_opt;
    std::vector<EpochLog> log;
};

void write_state(const std::filesystem::path& path, TrainingState& s, const CganConfig& cfg) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write training state " + tmp);
        out.write("SEIS", 4);
        nn::write_u16(out, 1);
        nn::write_f64(out, cfg.f_low_hz);
        nn::write_u64(out, cfg.seed);
        nn::write_u32(out, static_cast<std::uint32_t>(s.next_epoch));
        nn::write_network(out, s.g);
        nn::write_network(out, s.d);
        nn::write_u64(out, s.d_opt.step);
        nn::write_tensors(out, s.d_opt.first);
        nn::write_tensors(out, s.d_opt.second);
        nn::write_tensors(out, s.g_opt.velocity);
        nn::write_u32(out, static_cast<std::uint32_t>(s.log.size()));
        for (const auto& r : s.log) {
            nn::write_u32(out, static_cast<std::uint32_t>(r.epoch));
            for (double v : {r.d_loss, r.g_loss, r.mean_d_real, r.mean_d_fake, r.max_dev}) nn::write_f64(out, v);
            out.put(r.equilibrium ? 1 : 0);
        }
        if (!out) throw IoError("write failed on " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

TrainingState read_state(const std::filesystem::path& path, const CganConfig& cfg) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read training state " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SEIS", 4) != 0 || nn::read_u16(in) != 1)
        throw IoError(path.string() + " is not a training state file");
    const double f = nn::read_f64(in);
    const auto seed = nn::read_u64(in);
    if (f != cfg.f_low_hz || seed != cfg.seed)
        throw ConfigError("training state " + path.string() + " belongs to a different run (f_low or seed differ)");
    TrainingState s{static_cast<int>(nn::read_u32(in)), nn::read_network(in), nn::read_network(in), {}, {}, {}};
    s.d_opt = nn::AdamState<float>(cfg.d_adam, s.d.parameters());
    s.d_opt.step = nn::read_u64(in);
    s.d_opt.first = nn::read_tensors(in);
    s.d_opt.second = nn::read_tensors(in);
    s.g_opt = nn::MomentumSgdState<float>(cfg.g_lr, cfg.g_momentum, s.g.parameters());
    s.g_opt.velocity = nn::read_tensors(in);
    s.log.resize(nn::read_u32(in));
    for (auto& r : s.log) {
        r.epoch = static_cast<int>(nn::read_u32(in));
        for (double* v : {&r.d_loss, &r.g_loss, &r.mean_d_real, &r.mean_d_fake, &r.max_dev}) *v = nn::read_f64(in);
        char eq = 0;
        in.get(eq);
        r.equilibrium = eq != 0;
    }
    if (!in) throw IoError("truncated training state " + path.string());
    return s;
}

Tensor<float> stack(const Tensor<float>& a, const Tensor<float>& b) {
    auto shape = a.shape();
    shape[0] += b.dim(0);
    Tensor<float> out(shape);
    std::copy_n(a.data(), a.size(), out.data());
    std::copy_n(b.data(), b.size(), out.data() + a.size());
    return out;
}

bool finite_parameters(nn::Network<float>& net) {
    for (auto* p : net.parameters())
        if (!p->value.all_finite()) return false;
    return true;
}

}  // namespace

bool is_supported_low_rate(double f_low_hz) {
    for (double f : {2.5e6, 5e6, 10e6})
        if (std::abs(f_low_hz - f) < 1e-3) return true;
    return false;
}

int factor_for_rate(double f_low_hz) {
    if (!is_supported_low_rate(f_low_hz))
        throw std::invalid_argument("unsupported collection rate " + std::to_string(f_low_hz) +
                                    " Hz (expected 2.5, 5 or 10 MHz)");
    return static_cast<int>(std::lround(kHighRateHz / f_low_hz));
}

void CganConfig::validate(std::size_t train_size) const {
    factor_for_rate(f_low_hz);
    if (k < 1) throw ConfigError("cgan: k must be at least 1");
    if (epochs < 1) throw ConfigError("cgan: epochs must be at least 1");
    if (minibatch < 1) throw ConfigError("cgan: minibatch must be at least 1");
    if (train_size > 0 && minibatch > train_size)
        throw ConfigError("cgan: minibatch " + std::to_string(minibatch) + " exceeds training set size " +
                          std::to_string(train_size));
    if (!(equilibrium_eps > 0.0)) throw ConfigError("cgan: equilibrium_eps must be positive");
    if (!(g_lr > 0.0) || !(d_adam.lr > 0.0)) throw ConfigError("cgan: learning rates must be positive");
    if (l1_weight < 0.0) throw ConfigError("cgan: l1_weight must be non-negative");
    if (num_labels < 1) throw ConfigError("cgan: num_labels must be at least 1");
}

std::vector<LayerSpec> generator_specs(double f_low_hz) {
    const int factor = factor_for_rate(f_low_hz);
    std::size_t width = kHighRateWidth / static_cast<std::size_t>(factor);
    std::vector<LayerSpec> s{LayerSpec::conv2d(16, 1, 3), LayerSpec::relu(), LayerSpec::conv2d(32, 1, 3),
                             LayerSpec::relu(), LayerSpec::conv2d(1, 1, 1)};
    if (factor == 8) {
        s.push_back(LayerSpec::upsample2d(1, 2));
        width *= 2;
    } else {
        s.push_back(LayerSpec::maxpool2d(1, 2));
        width /= 2;
    }
    s.push_back(LayerSpec::conv2d(64, 1, 3));
    s.push_back(LayerSpec::relu());
    while (width < kHighRateWidth) {
        s.push_back(LayerSpec::upsample2d(1, 2));
        s.push_back(LayerSpec::conv2d(kDecoderChannels, 1, 3));
        s.push_back(LayerSpec::relu());
        width *= 2;
    }
    s.push_back(LayerSpec::conv2d(2, 1, 3));
    s.push_back(LayerSpec::sigmoid());
    return s;
}

std::size_t generator_bottleneck_layer(double f_low_hz) {
    return factor_for_rate(f_low_hz) == 8 ? 4 : 5;
}

nn::Network<float> build_generator(double f_low_hz, std::uint64_t seed) {
    const std::size_t w = kHighRateWidth / static_cast<std::size_t>(factor_for_rate(f_low_hz));
    return nn::Network<float>({2, kTensorRows, w}, generator_specs(f_low_hz), seed);
}

std::vector<LayerSpec> cnn_trunk_specs(std::uint32_t head, LayerKind activation) {
    std::vector<LayerSpec> s{LayerSpec::conv2d(16, 1, 3), LayerSpec::relu(),  LayerSpec::maxpool2d(1, 4),
                             LayerSpec::conv2d(32, 1, 3), LayerSpec::relu(),  LayerSpec::maxpool2d(1, 2),
                             LayerSpec::dense(64),        LayerSpec::relu(),  LayerSpec::dense(head)};
    s.push_back(LayerSpec{activation});
    return s;
}

nn::Network<float> build_discriminator(std::uint64_t seed) {
    return nn::Network<float>({2, kTensorRows, kHighRateWidth}, cnn_trunk_specs(1, LayerKind::Sigmoid), seed);
}

std::string training_log_header() { return "epoch,d_loss,g_loss,mean_d_real,mean_d_fake,equilibrium"; }

std::string training_log_row(const EpochLog& r) {
    std::ostringstream os;
    os.precision(9);
    os << r.epoch << ',' << r.d_loss << ',' << r.g_loss << ',' << r.mean_d_real << ',' << r.mean_d_fake << ','
       << (r.equilibrium ? 1 : 0);
    return os.str();
}

// --- TrainedGenerator ------------------------------------------------------

TrainedGenerator::TrainedGenerator(nn::Network<float> generator, double f_low_hz, LabelEmbedder embedder)
    : generator_(std::move(generator)), f_low_hz_(f_low_hz), embedder_(std::move(embedder)) {
    factor_for_rate(f_low_hz_);
}

PreambleTensor TrainedGenerator::upsample(const ComplexSequence& low, int label) {
    if (std::abs(low.fs() - f_low_hz_) > 1e-3)
        throw std::invalid_argument("upsample: input sampled at " + std::to_string(low.fs()) +
                                    " Hz, generator expects " + std::to_string(f_low_hz_) + " Hz");
    return upsample(std::vector<PreambleTensor>{to_tensor(low, label)}, {label}).front();
}

std::vector<PreambleTensor> TrainedGenerator::upsample(const std::vector<PreambleTensor>& low,
                                                       const std::vector<int>& labels) {
    if (low.size() != labels.size()) throw std::invalid_argument("upsample: one label per tensor required");
    const std::size_t want = generator_.input_shape()[2];
    std::vector<PreambleTensor> out;
    out.reserve(low.size());
    std::vector<PreambleTensor> chunk;
    for (std::size_t start = 0; start < low.size(); start += kInferenceChunk) {
        const std::size_t end = std::min(low.size(), start + kInferenceChunk);
        chunk.clear();
        for (std::size_t i = start; i < end; ++i) {
            if (low[i].channels != 1 || low[i].width != want)
                throw std::invalid_argument("upsample: expected 4 x " + std::to_string(want) + " x 1 input, got 4 x " +
                                            std::to_string(low[i].width) + " x " + std::to_string(low[i].channels));
            chunk.push_back(attach_label(low[i], embedder_.label_channel(labels[i], want)));
        }
        const auto& y = generator_.forward(make_batch(chunk));
        for (std::size_t n = 0; n < chunk.size(); ++n) {
            auto t = strip_label(from_batch(y, n));
            t.label = low[start + n].label;
            t.snr_db = low[start + n].snr_db;
            out.push_back(std::move(t));
        }
    }
    return out;
}

void TrainedGenerator::save(const std::filesystem::path& path, const std::string& tag) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    out.write("SEIG", 4);
    nn::write_u16(out, 2);
    nn::write_u32(out, static_cast<std::uint32_t>(tag.size()));
    out.write(tag.data(), static_cast<std::streamsize>(tag.size()));
    nn::write_f64(out, f_low_hz_);
    nn::write_network(out, generator_);
    embedder_.write(out);
    if (!out) throw IoError("write failed on " + path.string());
}

namespace {

std::string read_generator_header(std::istream& in, const std::filesystem::path& path) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "SEIG", 4) != 0 || nn::read_u16(in) != 2)
        throw IoError(path.string() + " is not a generator checkpoint");
    const auto n = nn::read_u32(in);
    if (n > (1u << 20)) throw IoError(path.string() + ": corrupt tag length");
    std::string tag(n, '\0');
    if (!in.read(tag.data(), n)) throw IoError(path.string() + ": truncated header");
    return tag;
}

}  // namespace

std::string TrainedGenerator::stored_tag(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PrerequisiteError("cannot read generator checkpoint " + path.string());
    return read_generator_header(in, path);
}

TrainedGenerator TrainedGenerator::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PrerequisiteError("cannot read generator checkpoint " + path.string());
    read_generator_header(in, path);
    const double f = nn::read_f64(in);
    auto g = nn::read_network(in);
    auto e = LabelEmbedder::read(in);
    return TrainedGenerator(std::move(g), f, std::move(e));
}

// --- training --------------------------------------------------------------

CganResult train_cgan(const std::vector<PreambleRecord>& high, const std::vector<PreambleRecord>& low,
                      const CganConfig& cfg, const CganRunOptions& opts) {
    cfg.validate(high.size());
    if (high.empty()) throw std::invalid_argument("train_cgan: empty training set");
    if (high.size() != low.size())
        throw std::invalid_argument("train_cgan: " + std::to_string(high.size()) + " full-rate records but " +
                                    std::to_string(low.size()) + " low-rate records");
    const int factor = factor_for_rate(cfg.f_low_hz);
    std::vector<ComplexSequence> high_seq, low_seq;
    std::vector<int> labels;
    for (std::size_t i = 0; i < high.size(); ++i) {
        const auto& h = high[i];
        const auto& l = low[i];
        if (h.emitter_id != l.emitter_id || h.realization != l.realization || h.snr_db != l.snr_db ||
            (h.preamble_index >= 0 && h.preamble_index != l.preamble_index))
            throw std::invalid_argument("train_cgan: record " + std::to_string(i) +
                                        " of the low-rate set is not the twin of the full-rate record");
        if (std::abs(h.sequence.fs() - kHighRateHz) > 1e-3 || std::abs(l.sequence.fs() - cfg.f_low_hz) > 1e-3)
            throw std::invalid_argument("train_cgan: record " + std::to_string(i) + " has the wrong sampling rate");
        if (h.emitter_id < 1 || h.emitter_id > cfg.num_labels)
            throw std::invalid_argument("train_cgan: label " + std::to_string(h.emitter_id) + " out of range");
        high_seq.push_back(h.sequence);
        low_seq.push_back(l.sequence);
        labels.push_back(h.emitter_id);
    }

    LabelEmbedder embedder(cfg.num_labels, derive_seed(cfg.seed, {0xE}));
    std::optional<Prepared> fixed;
    if (!cfg.augment) fixed = prepare(high_seq, low_seq, labels, embedder);

    TrainingState st{1, build_generator(cfg.f_low_hz, derive_seed(cfg.seed, {1})),
                     build_discriminator(derive_seed(cfg.seed, {2})), {}, {}, {}};
    st.d_opt = nn::AdamState<float>(cfg.d_adam, st.d.parameters());
    st.g_opt = nn::MomentumSgdState<float>(cfg.g_lr, cfg.g_momentum, st.g.parameters());
    if (opts.state_file && std::filesystem::exists(*opts.state_file)) st = read_state(*opts.state_file, cfg);

    const std::size_t n = high.size();
    std::size_t batches = n / cfg.minibatch;
    if (cfg.max_batches_per_epoch > 0) batches = std::min(batches, cfg.max_batches_per_epoch);

    bool stopped = !st.log.empty() && st.log.back().equilibrium;
    int ran = 0;
    std::vector<std::size_t> perm(n), idx;
    while (!stopped && st.next_epoch <= cfg.epochs) {
        if (opts.interrupt_after > 0 && ran >= opts.interrupt_after)
            return {TrainedGenerator(st.g, cfg.f_low_hz, embedder), st.log, false};
        const int epoch = st.next_epoch;
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        Rng order(derive_seed(cfg.seed, {3, static_cast<std::uint64_t>(epoch)}));
        order.shuffle(perm.begin(), perm.end());

        EpochLog row;
        row.epoch = epoch;
        std::size_t d_count = 0, g_count = 0;
        for (std::size_t b = 0; b < batches; ++b) {
            idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(b * cfg.minibatch),
                       perm.begin() + static_cast<std::ptrdiff_t>((b + 1) * cfg.minibatch));
            Tensor<float> real, lowb;
            if (fixed) {
                real = make_batch(fixed->high, idx);
                lowb = make_batch(fixed->low, idx);
            } else {
                std::vector<ComplexSequence> batch_seq;
                std::vector<int> batch_labels;
                for (auto i : idx) {
                    batch_seq.push_back(high_seq[i]);
                    batch_labels.push_back(labels[i]);
                }
                auto noisy = online_augment(batch_seq, cfg.augment_snr, augment_seed(cfg.seed, epoch, b));
                std::vector<ComplexSequence> noisy_low;
                for (const auto& s : noisy) noisy_low.push_back(decimate(s, factor));
                auto p = prepare(noisy, noisy_low, batch_labels, embedder);
                real = make_batch(p.high);
                lowb = make_batch(p.low);
            }
            const std::size_t bs = idx.size();

            Tensor<float> d_real;
            for (int step = 0; step < cfg.k; ++step) {
                const Tensor<float> g_out = st.g.forward(lowb);
                const Tensor<float> fake = fake_input(g_out, real);
                st.d.zero_grad();
                const auto& both = st.d.forward(stack(real, fake));
                d_real = nn::slice_batch(both, 0, bs);
                const Tensor<float> d_fake_probe = nn::slice_batch(both, bs, bs);
                const auto losses = nn::gan_losses(d_real, d_fake_probe, cfg.g_loss);
                st.d.backward_from_logits(stack(losses.d_grad_real_logits, losses.d_grad_fake_logits));
                nn::adam_step(st.d_opt, st.d.parameters());

                row.d_loss += losses.d_loss;
                for (std::size_t i = 0; i < bs; ++i) {
                    row.mean_d_real += d_real[i];
                    row.mean_d_fake += d_fake_probe[i];
                    row.max_dev = std::max({row.max_dev, std::abs(double(d_real[i]) - 0.5),
                                            std::abs(double(d_fake_probe[i]) - 0.5)});
                }
                ++d_count;
            }

            st.g.zero_grad();
            const Tensor<float> g_out = st.g.forward(lowb);
            const Tensor<float> fake = fake_input(g_out, real);
            const Tensor<float> d_fake = st.d.forward(fake);
            const auto losses = nn::gan_losses(d_real, d_fake, cfg.g_loss);
            const Tensor<float> d_in = st.d.backward_from_logits(losses.g_grad_fake_logits);
            Tensor<float> dg(g_out.shape());
            const std::size_t plane = kTensorRows * kHighRateWidth;
            double g_loss = losses.g_loss;
            const double l1_scale = cfg.l1_weight / double(bs * plane);
            for (std::size_t i = 0; i < bs; ++i) {
                const std::size_t off = i * 2 * plane;
                for (std::size_t j = 0; j < plane; ++j) {
                    float grad = d_in[off + j];
                    if (cfg.l1_weight > 0.0) {
                        const double diff = double(g_out[off + j]) - double(real[off + j]);
                        g_loss += l1_scale * std::abs(diff);
                        grad += static_cast<float>(l1_scale * (diff > 0 ? 1.0 : diff < 0 ? -1.0 : 0.0));
                    }
                    dg[off + j] = grad;
                }
            }
            st.g.backward(dg);
            st.g_opt.step(st.g.parameters());
            row.g_loss += g_loss;
            ++g_count;
        }
        if (!finite_parameters(st.g) || !finite_parameters(st.d) || !std::isfinite(row.d_loss) || !std::isfinite(row.g_loss))
            throw NumericError("train_cgan: non-finite values at epoch " + std::to_string(epoch));
        row.d_loss /= double(std::max<std::size_t>(d_count, 1));
        row.g_loss /= double(std::max<std::size_t>(g_count, 1));
        const double seen = double(std::max<std::size_t>(d_count * cfg.minibatch, 1));
        row.mean_d_real /= seen;
        row.mean_d_fake /= seen;
        row.equilibrium = d_count > 0 && row.max_dev < cfg.equilibrium_eps;
        st.log.push_back(row);
        st.next_epoch = epoch + 1;
        ++ran;
        if (opts.on_epoch) opts.on_epoch(row);
        if (opts.state_file) write_state(*opts.state_file, st, cfg);
        stopped = row.equilibrium;
    }
    return {TrainedGenerator(st.g, cfg.f_low_hz, embedder), st.log, true};
}

}  // namespace seilab
