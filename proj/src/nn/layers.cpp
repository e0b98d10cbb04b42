#include "seilab/nn/layers.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seilab::nn {

namespace {

template <typename T>
using MatRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapRM = Eigen::Map<MatRM<T>>;
template <typename T>
using CMapRM = Eigen::Map<const MatRM<T>>;

// im2col buffers are capped at this many elements per chunk of examples.
constexpr std::size_t kColBudget = std::size_t{1} << 20;

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double init_limit(Init scheme, double fan_in, double fan_out) {
    return scheme == Init::HeUniform ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
}

template <typename T>
void fill_uniform(Tensor<T>& t, Rng& rng, double limit) {
    for (auto& v : t.values()) v = static_cast<T>(rng.uniform(-limit, limit));
}

// --- conv2d ---------------------------------------------------------------

template <typename T>
class Conv2d final : public Layer<T> {
public:
    Conv2d(const LayerSpec& s, const Shape& in)
        : spec_(s), cin_(in[0]), h_(in[1]), w_(in[2]), out_(infer_output_shape(s, in)) {
        weight_.name = "conv.weight";
        weight_.value = Tensor<T>({s.out_channels, cin_, s.kernel_h, s.kernel_w});
        weight_.grad = weight_.value;
        bias_.name = "conv.bias";
        bias_.value = Tensor<T>({s.out_channels});
        bias_.grad = bias_.value;
    }

    LayerSpec spec() const override { return spec_; }
    Shape output_shape() const override { return out_; }
    std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv2d>(*this); }

    void initialize(Rng& rng, Init scheme) override {
        const double k = static_cast<double>(spec_.kernel_h * spec_.kernel_w);
        fill_uniform(weight_.value, rng, init_limit(scheme, cin_ * k, spec_.out_channels * k));
        bias_.value.fill(T(0));
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        const std::size_t n = batch_of(x), cout = spec_.out_channels, p = out_[1] * out_[2];
        y.resize({n, cout, out_[1], out_[2]});
        const CMapRM<T> wmat(weight_.value.data(), cout, kdim());
        for (std::size_t b0 = 0; b0 < n; b0 += chunk()) {
            const std::size_t nb = std::min(chunk(), n - b0);
            im2col(x, b0, nb);
            prod_.resize(cout * nb * p);
            MapRM<T> out(prod_.data(), cout, nb * p);
            out.noalias() = wmat * CMapRM<T>(col_.data(), kdim(), nb * p);
            for (std::size_t b = 0; b < nb; ++b)
                for (std::size_t co = 0; co < cout; ++co) {
                    T* dst = y.data() + ((b0 + b) * cout + co) * p;
                    const T* src = prod_.data() + co * nb * p + b * p;
                    const T bias = bias_.value[co];
                    for (std::size_t i = 0; i < p; ++i) dst[i] = src[i] + bias;
                }
        }
    }

    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        const std::size_t n = batch_of(x), cout = spec_.out_channels, p = out_[1] * out_[2];
        dx.resize(x.shape());
        dx.fill(T(0));
        const CMapRM<T> wmat(weight_.value.data(), cout, kdim());
        MapRM<T> dw(weight_.grad.data(), cout, kdim());
        for (std::size_t co = 0; co < cout; ++co) {
            double acc = 0.0;
            for (std::size_t b = 0; b < n; ++b) {
                const T* src = dy.data() + (b * cout + co) * p;
                for (std::size_t i = 0; i < p; ++i) acc += src[i];
            }
            bias_.grad[co] += static_cast<T>(acc);
        }
        for (std::size_t b0 = 0; b0 < n; b0 += chunk()) {
            const std::size_t nb = std::min(chunk(), n - b0);
            im2col(x, b0, nb);
            prod_.resize(cout * nb * p);
            MapRM<T> dout(prod_.data(), cout, nb * p);
            for (std::size_t b = 0; b < nb; ++b)
                for (std::size_t co = 0; co < cout; ++co)
                    std::copy_n(dy.data() + ((b0 + b) * cout + co) * p, p, prod_.data() + co * nb * p + b * p);
            const CMapRM<T> col(col_.data(), kdim(), nb * p);
            dw.noalias() += dout * col.transpose();
            dcol_.resize(kdim() * nb * p);
            MapRM<T> dcol(dcol_.data(), kdim(), nb * p);
            dcol.noalias() = wmat.transpose() * dout;
            col2im(dx, b0, nb);
        }
    }

private:
    std::size_t kdim() const { return cin_ * spec_.kernel_h * spec_.kernel_w; }
    std::size_t chunk() const { return std::max<std::size_t>(1, kColBudget / (kdim() * out_[1] * out_[2])); }

    void im2col(const Tensor<T>& x, std::size_t b0, std::size_t nb) {
        const std::size_t ho = out_[1], wo = out_[2], p = ho * wo;
        col_.assign(kdim() * nb * p, T(0));
        for (std::size_t ci = 0; ci < cin_; ++ci)
            for (std::size_t ki = 0; ki < spec_.kernel_h; ++ki)
                for (std::size_t kj = 0; kj < spec_.kernel_w; ++kj) {
                    const std::size_t k = (ci * spec_.kernel_h + ki) * spec_.kernel_w + kj;
                    for (std::size_t b = 0; b < nb; ++b) {
                        const T* src = x.data() + ((b0 + b) * cin_ + ci) * h_ * w_;
                        T* dst = col_.data() + k * nb * p + b * p;
                        for (std::size_t oh = 0; oh < ho; ++oh) {
                            const auto ih = static_cast<std::ptrdiff_t>(oh * spec_.stride_h + ki) -
                                            static_cast<std::ptrdiff_t>(spec_.pad_h);
                            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(h_)) continue;
                            const T* row = src + static_cast<std::size_t>(ih) * w_;
                            T* out = dst + oh * wo;
                            if (spec_.stride_w == 1) {
                                const auto [lo, hi] = valid_range(kj, wo);
                                std::copy(row + lo + kj - spec_.pad_w, row + hi + kj - spec_.pad_w, out + lo);
                                continue;
                            }
                            for (std::size_t ow = 0; ow < wo; ++ow) {
                                const auto iw = static_cast<std::ptrdiff_t>(ow * spec_.stride_w + kj) -
                                                static_cast<std::ptrdiff_t>(spec_.pad_w);
                                if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(w_))
                                    out[ow] = row[static_cast<std::size_t>(iw)];
                            }
                        }
                    }
                }
    }

    /// Output columns [lo, hi) whose stride-1 input column ow + kj - pad lies inside the row.
    std::pair<std::size_t, std::size_t> valid_range(std::size_t kj, std::size_t wo) const {
        const auto shift = static_cast<std::ptrdiff_t>(kj) - static_cast<std::ptrdiff_t>(spec_.pad_w);
        const auto lo = std::max<std::ptrdiff_t>(0, -shift);
        const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(wo),
                                                 static_cast<std::ptrdiff_t>(w_) - shift);
        return {static_cast<std::size_t>(lo), static_cast<std::size_t>(std::max(lo, hi))};
    }

    void col2im(Tensor<T>& dx, std::size_t b0, std::size_t nb) const {
        const std::size_t ho = out_[1], wo = out_[2], p = ho * wo;
        for (std::size_t ci = 0; ci < cin_; ++ci)
            for (std::size_t ki = 0; ki < spec_.kernel_h; ++ki)
                for (std::size_t kj = 0; kj < spec_.kernel_w; ++kj) {
                    const std::size_t k = (ci * spec_.kernel_h + ki) * spec_.kernel_w + kj;
                    for (std::size_t b = 0; b < nb; ++b) {
                        T* dst = dx.data() + ((b0 + b) * cin_ + ci) * h_ * w_;
                        const T* src = dcol_.data() + k * nb * p + b * p;
                        for (std::size_t oh = 0; oh < ho; ++oh) {
                            const auto ih = static_cast<std::ptrdiff_t>(oh * spec_.stride_h + ki) -
                                            static_cast<std::ptrdiff_t>(spec_.pad_h);
                            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(h_)) continue;
                            T* row = dst + static_cast<std::size_t>(ih) * w_;
                            const T* in = src + oh * wo;
                            if (spec_.stride_w == 1) {
                                const auto [lo, hi] = valid_range(kj, wo);
                                T* r = row + kj - spec_.pad_w;
                                for (std::size_t ow = lo; ow < hi; ++ow) r[ow] += in[ow];
                                continue;
                            }
                            for (std::size_t ow = 0; ow < wo; ++ow) {
                                const auto iw = static_cast<std::ptrdiff_t>(ow * spec_.stride_w + kj) -
                                                static_cast<std::ptrdiff_t>(spec_.pad_w);
                                if (iw >= 0 && iw < static_cast<std::ptrdiff_t>(w_))
                                    row[static_cast<std::size_t>(iw)] += src[oh * wo + ow];
                            }
                        }
                    }
                }
    }

    LayerSpec spec_;
    std::size_t cin_, h_, w_;
    Shape out_;
    Parameter<T> weight_, bias_;
    std::vector<T> col_, dcol_, prod_;
};

// --- dense ----------------------------------------------------------------

template <typename T>
class Dense final : public Layer<T> {
public:
    Dense(const LayerSpec& s, const Shape& in) : spec_(s), in_dim_(shape_size(in)) {
        weight_.name = "dense.weight";
        weight_.value = Tensor<T>({s.units, in_dim_});
        weight_.grad = weight_.value;
        bias_.name = "dense.bias";
        bias_.value = Tensor<T>({s.units});
        bias_.grad = bias_.value;
    }

    LayerSpec spec() const override { return spec_; }
    Shape output_shape() const override { return {spec_.units}; }
    std::vector<Parameter<T>*> parameters() override { return {&weight_, &bias_}; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

    void initialize(Rng& rng, Init scheme) override {
        fill_uniform(weight_.value, rng, init_limit(scheme, static_cast<double>(in_dim_), spec_.units));
        bias_.value.fill(T(0));
    }

    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        const std::size_t n = batch_of(x), u = spec_.units;
        y.resize({n, u});
        MapRM<T> out(y.data(), n, u);
        out.noalias() = CMapRM<T>(x.data(), n, in_dim_) * CMapRM<T>(weight_.value.data(), u, in_dim_).transpose();
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t j = 0; j < u; ++j) out(b, j) += bias_.value[j];
    }

    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        const std::size_t n = batch_of(x), u = spec_.units;
        const CMapRM<T> g(dy.data(), n, u);
        MapRM<T>(weight_.grad.data(), u, in_dim_).noalias() += g.transpose() * CMapRM<T>(x.data(), n, in_dim_);
        for (std::size_t j = 0; j < u; ++j) {
            double acc = 0.0;
            for (std::size_t b = 0; b < n; ++b) acc += g(b, j);
            bias_.grad[j] += static_cast<T>(acc);
        }
        dx.resize(x.shape());
        MapRM<T>(dx.data(), n, in_dim_).noalias() = g * CMapRM<T>(weight_.value.data(), u, in_dim_);
    }

private:
    LayerSpec spec_;
    std::size_t in_dim_;
    Parameter<T> weight_, bias_;
};

// --- elementwise ------------------------------------------------------------

template <typename T>
class Relu final : public Layer<T> {
public:
    explicit Relu(const Shape& in) : shape_(in) {}
    LayerSpec spec() const override { return LayerSpec::relu(); }
    Shape output_shape() const override { return shape_; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Relu>(*this); }
    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        y.resize(x.shape());
        const T* in = x.data();
        T* out = y.data();
        for (std::size_t i = 0, n = x.size(); i < n; ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
    }
    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        dx.resize(x.shape());
        const T* in = x.data();
        const T* g = dy.data();
        T* out = dx.data();
        for (std::size_t i = 0, n = x.size(); i < n; ++i) out[i] = in[i] > T(0) ? g[i] : T(0);
    }

private:
    Shape shape_;
};

template <typename T>
class Sigmoid final : public Layer<T> {
public:
    explicit Sigmoid(const Shape& in) : shape_(in) {}
    LayerSpec spec() const override { return LayerSpec::sigmoid(); }
    Shape output_shape() const override { return shape_; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Sigmoid>(*this); }
    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        y.resize(x.shape());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const T v = x[i];
            if (v >= T(0)) {
                y[i] = T(1) / (T(1) + std::exp(-v));
            } else {
                const T e = std::exp(v);
                y[i] = e / (T(1) + e);
            }
        }
    }
    void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) override {
        dx.resize(x.shape());
        for (std::size_t i = 0; i < x.size(); ++i) dx[i] = dy[i] * y[i] * (T(1) - y[i]);
    }

private:
    Shape shape_;
};

template <typename T>
class Softmax final : public Layer<T> {
public:
    explicit Softmax(const Shape& in) : shape_(in), dim_(shape_size(in)) {}
    LayerSpec spec() const override { return LayerSpec::softmax(); }
    Shape output_shape() const override { return shape_; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Softmax>(*this); }
    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        y.resize(x.shape());
        const std::size_t n = batch_of(x);
        for (std::size_t b = 0; b < n; ++b) {
            const T* in = x.data() + b * dim_;
            T* out = y.data() + b * dim_;
            const T m = *std::max_element(in, in + dim_);
            double sum = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) sum += std::exp(static_cast<double>(in[i] - m));
            for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<T>(std::exp(static_cast<double>(in[i] - m)) / sum);
        }
    }
    void backward(const Tensor<T>& x, const Tensor<T>& y, const Tensor<T>& dy, Tensor<T>& dx) override {
        dx.resize(x.shape());
        const std::size_t n = batch_of(x);
        for (std::size_t b = 0; b < n; ++b) {
            const T* p = y.data() + b * dim_;
            const T* g = dy.data() + b * dim_;
            double dot = 0.0;
            for (std::size_t i = 0; i < dim_; ++i) dot += static_cast<double>(g[i]) * p[i];
            for (std::size_t i = 0; i < dim_; ++i) dx[b * dim_ + i] = static_cast<T>(p[i] * (g[i] - dot));
        }
    }

private:
    Shape shape_;
    std::size_t dim_;
};

template <typename T>
class Flatten final : public Layer<T> {
public:
    explicit Flatten(const Shape& in) : in_(in) {}
    LayerSpec spec() const override { return LayerSpec::flatten(); }
    Shape output_shape() const override { return {shape_size(in_)}; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Flatten>(*this); }
    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        y = x;
        y.reshape({batch_of(x), shape_size(in_)});
    }
    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        dx = dy;
        dx.reshape(x.shape());
    }

private:
    Shape in_;
};

// --- pooling / upsampling ---------------------------------------------------

template <typename T>
class MaxPool2d final : public Layer<T> {
public:
    MaxPool2d(const LayerSpec& s, const Shape& in) : spec_(s), in_(in), out_(infer_output_shape(s, in)) {}
    LayerSpec spec() const override { return spec_; }
    Shape output_shape() const override { return out_; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<MaxPool2d>(*this); }

    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        const std::size_t n = batch_of(x), c = in_[0], h = in_[1], w = in_[2], ho = out_[1], wo = out_[2];
        y.resize({n, c, ho, wo});
        argmax_.resize(y.size());
        for (std::size_t bc = 0; bc < n * c; ++bc) {
            const T* src = x.data() + bc * h * w;
            for (std::size_t oh = 0; oh < ho; ++oh)
                for (std::size_t ow = 0; ow < wo; ++ow) {
                    std::size_t best = (oh * spec_.window_h) * w + ow * spec_.window_w;
                    for (std::size_t i = 0; i < spec_.window_h; ++i)
                        for (std::size_t j = 0; j < spec_.window_w; ++j) {
                            const std::size_t idx = (oh * spec_.window_h + i) * w + ow * spec_.window_w + j;
                            if (src[idx] > src[best]) best = idx;
                        }
                    const std::size_t o = bc * ho * wo + oh * wo + ow;
                    y[o] = src[best];
                    argmax_[o] = bc * h * w + best;
                }
        }
    }

    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        dx.resize(x.shape());
        dx.fill(T(0));
        for (std::size_t o = 0; o < dy.size(); ++o) dx[argmax_[o]] += dy[o];
    }

private:
    LayerSpec spec_;
    Shape in_, out_;
    std::vector<std::size_t> argmax_;
};

template <typename T>
class Upsample2d final : public Layer<T> {
public:
    Upsample2d(const LayerSpec& s, const Shape& in) : spec_(s), in_(in), out_(infer_output_shape(s, in)) {}
    LayerSpec spec() const override { return spec_; }
    Shape output_shape() const override { return out_; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Upsample2d>(*this); }

    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        const std::size_t n = batch_of(x), c = in_[0], h = in_[1], w = in_[2], ho = out_[1], wo = out_[2];
        y.resize({n, c, ho, wo});
        for (std::size_t bc = 0; bc < n * c; ++bc) {
            const T* src = x.data() + bc * h * w;
            T* dst = y.data() + bc * ho * wo;
            const std::size_t uh = spec_.window_h, uw = spec_.window_w;
            for (std::size_t oh = 0; oh < ho; ++oh) {
                const T* r = src + (oh / uh) * w;
                T* o = dst + oh * wo;
                for (std::size_t iw = 0; iw < w; ++iw)
                    for (std::size_t k = 0; k < uw; ++k) o[iw * uw + k] = r[iw];
            }
        }
    }

    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        const std::size_t n = batch_of(x), c = in_[0], h = in_[1], w = in_[2], ho = out_[1], wo = out_[2];
        dx.resize(x.shape());
        dx.fill(T(0));
        for (std::size_t bc = 0; bc < n * c; ++bc) {
            T* dst = dx.data() + bc * h * w;
            const T* src = dy.data() + bc * ho * wo;
            const std::size_t uh = spec_.window_h, uw = spec_.window_w;
            for (std::size_t oh = 0; oh < ho; ++oh) {
                T* r = dst + (oh / uh) * w;
                const T* g = src + oh * wo;
                for (std::size_t iw = 0; iw < w; ++iw) {
                    T acc = r[iw];
                    for (std::size_t k = 0; k < uw; ++k) acc += g[iw * uw + k];
                    r[iw] = acc;
                }
            }
        }
    }

private:
    LayerSpec spec_;
    Shape in_, out_;
};

// --- embedding --------------------------------------------------------------

template <typename T>
class Embedding final : public Layer<T> {
public:
    explicit Embedding(const LayerSpec& s) : spec_(s) {
        table_.name = "embedding.table";
        table_.value = Tensor<T>({s.vocab, s.dim});
        table_.grad = table_.value;
    }
    LayerSpec spec() const override { return spec_; }
    Shape output_shape() const override { return {spec_.dim}; }
    std::vector<Parameter<T>*> parameters() override { return {&table_}; }
    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Embedding>(*this); }

    void initialize(Rng& rng, Init) override { fill_uniform(table_.value, rng, 1.0); }

    void forward(const Tensor<T>& x, Tensor<T>& y) override {
        const std::size_t n = batch_of(x);
        y.resize({n, spec_.dim});
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t row = index_of(x[b]);
            std::copy_n(table_.value.data() + row * spec_.dim, spec_.dim, y.data() + b * spec_.dim);
        }
    }

    // Indices are not differentiable; dx is zero.
    void backward(const Tensor<T>& x, const Tensor<T>&, const Tensor<T>& dy, Tensor<T>& dx) override {
        const std::size_t n = batch_of(x);
        for (std::size_t b = 0; b < n; ++b) {
            const std::size_t row = index_of(x[b]);
            for (std::size_t j = 0; j < spec_.dim; ++j) table_.grad[row * spec_.dim + j] += dy[b * spec_.dim + j];
        }
        dx.resize(x.shape());
        dx.fill(T(0));
    }

private:
    std::size_t index_of(T v) const {
        const auto i = static_cast<long long>(std::llround(static_cast<double>(v)));
        if (i < 0 || i >= static_cast<long long>(spec_.vocab))
            throw std::invalid_argument("embedding: index " + std::to_string(i) + " outside vocabulary of " +
                                        std::to_string(spec_.vocab));
        return static_cast<std::size_t>(i);
    }

    LayerSpec spec_;
    Parameter<T> table_;
};

}  // namespace

std::string kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Dense: return "dense";
        case LayerKind::Relu: return "relu";
        case LayerKind::Sigmoid: return "sigmoid";
        case LayerKind::MaxPool2d: return "maxpool2d";
        case LayerKind::Upsample2d: return "upsample2d";
        case LayerKind::Embedding: return "embedding";
        case LayerKind::Softmax: return "softmax";
        case LayerKind::Flatten: return "flatten";
    }
    return "unknown";
}

LayerSpec LayerSpec::conv2d(std::uint32_t out_channels, std::uint32_t kh, std::uint32_t kw) {
    LayerSpec s{LayerKind::Conv2d};
    s.out_channels = out_channels;
    s.kernel_h = kh;
    s.kernel_w = kw;
    s.pad_h = kh / 2;
    s.pad_w = kw / 2;
    return s;
}

LayerSpec LayerSpec::dense(std::uint32_t units) {
    LayerSpec s{LayerKind::Dense};
    s.units = units;
    return s;
}

LayerSpec LayerSpec::maxpool2d(std::uint32_t ph, std::uint32_t pw) {
    LayerSpec s{LayerKind::MaxPool2d};
    s.window_h = ph;
    s.window_w = pw;
    return s;
}

LayerSpec LayerSpec::upsample2d(std::uint32_t uh, std::uint32_t uw) {
    LayerSpec s{LayerKind::Upsample2d};
    s.window_h = uh;
    s.window_w = uw;
    return s;
}

LayerSpec LayerSpec::embedding(std::uint32_t vocab, std::uint32_t dim) {
    LayerSpec s{LayerKind::Embedding};
    s.vocab = vocab;
    s.dim = dim;
    return s;
}

Shape infer_output_shape(const LayerSpec& s, const Shape& in) {
    const std::string who = kind_name(s.kind) + ": ";
    switch (s.kind) {
        case LayerKind::Conv2d: {
            require(in.size() == 3, who + "expects [C,H,W] input, got " + shape_str(in));
            require(s.out_channels > 0 && s.kernel_h > 0 && s.kernel_w > 0 && s.stride_h > 0 && s.stride_w > 0,
                    who + "invalid hyperparameters");
            const auto h = static_cast<std::ptrdiff_t>(in[1] + 2 * s.pad_h) - static_cast<std::ptrdiff_t>(s.kernel_h);
            const auto w = static_cast<std::ptrdiff_t>(in[2] + 2 * s.pad_w) - static_cast<std::ptrdiff_t>(s.kernel_w);
            require(h >= 0 && w >= 0, who + "kernel larger than padded input " + shape_str(in));
            return {s.out_channels, static_cast<std::size_t>(h) / s.stride_h + 1,
                    static_cast<std::size_t>(w) / s.stride_w + 1};
        }
        case LayerKind::Dense:
            require(s.units > 0 && !in.empty(), who + "invalid units or input " + shape_str(in));
            return {s.units};
        case LayerKind::MaxPool2d:
            require(in.size() == 3, who + "expects [C,H,W] input, got " + shape_str(in));
            require(s.window_h > 0 && s.window_w > 0, who + "window must be positive");
            require(in[1] >= s.window_h && in[2] >= s.window_w, who + "window larger than input " + shape_str(in));
            return {in[0], in[1] / s.window_h, in[2] / s.window_w};
        case LayerKind::Upsample2d:
            require(in.size() == 3, who + "expects [C,H,W] input, got " + shape_str(in));
            require(s.window_h > 0 && s.window_w > 0, who + "factor must be positive");
            return {in[0], in[1] * s.window_h, in[2] * s.window_w};
        case LayerKind::Embedding:
            require(in == Shape{1}, who + "expects a single index per example, got " + shape_str(in));
            require(s.vocab > 0 && s.dim > 0, who + "vocab and dim must be positive");
            return {s.dim};
        case LayerKind::Flatten:
            return {shape_size(in)};
        case LayerKind::Relu:
        case LayerKind::Sigmoid:
        case LayerKind::Softmax:
            require(!in.empty(), who + "empty input shape");
            return in;
    }
    throw std::invalid_argument("unknown layer kind");
}

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& s, const Shape& in) {
    (void)infer_output_shape(s, in);
    switch (s.kind) {
        case LayerKind::Conv2d: return std::make_unique<Conv2d<T>>(s, in);
        case LayerKind::Dense: return std::make_unique<Dense<T>>(s, in);
        case LayerKind::Relu: return std::make_unique<Relu<T>>(in);
        case LayerKind::Sigmoid: return std::make_unique<Sigmoid<T>>(in);
        case LayerKind::MaxPool2d: return std::make_unique<MaxPool2d<T>>(s, in);
        case LayerKind::Upsample2d: return std::make_unique<Upsample2d<T>>(s, in);
        case LayerKind::Embedding: return std::make_unique<Embedding<T>>(s);
        case LayerKind::Softmax: return std::make_unique<Softmax<T>>(in);
        case LayerKind::Flatten: return std::make_unique<Flatten<T>>(in);
    }
    throw std::invalid_argument("unknown layer kind");
}

template std::unique_ptr<Layer<float>> make_layer<float>(const LayerSpec&, const Shape&);
template std::unique_ptr<Layer<double>> make_layer<double>(const LayerSpec&, const Shape&);

}  // namespace seilab::nn
