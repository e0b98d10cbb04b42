#include "seilab/nn/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "seilab/common.hpp"

namespace seilab::nn {

namespace {

template <typename V>
void put(std::ostream& out, V v) {
    unsigned char b[sizeof(V)];
    std::memcpy(b, &v, sizeof(V));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(V));
    out.write(reinterpret_cast<const char*>(b), sizeof(V));
}

template <typename V>
V get(std::istream& in) {
    unsigned char b[sizeof(V)];
    if (!in.read(reinterpret_cast<char*>(b), sizeof(V))) throw IoError("checkpoint: unexpected end of data");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(V));
    V v;
    std::memcpy(&v, b, sizeof(V));
    return v;
}

void expect_magic(std::istream& in, const char* magic) {
    char m[4];
    if (!in.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw IoError(std::string("checkpoint: bad magic, expected ") + magic);
}

void write_tensor(std::ostream& out, const Tensor<float>& t) {
    write_u32(out, static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) write_u32(out, static_cast<std::uint32_t>(d));
    for (float v : t.values()) write_f32(out, v);
}

Tensor<float> read_tensor(std::istream& in) {
    const auto rank = read_u32(in);
    if (rank > 8) throw IoError("checkpoint: implausible tensor rank " + std::to_string(rank));
    Shape s(rank);
    for (auto& d : s) d = read_u32(in);
    Tensor<float> t(s);
    for (auto& v : t.values()) v = read_f32(in);
    return t;
}

}  // namespace

void write_u16(std::ostream& out, std::uint16_t v) { put(out, v); }
void write_u32(std::ostream& out, std::uint32_t v) { put(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put(out, v); }
void write_f32(std::ostream& out, float v) { put(out, v); }
void write_f64(std::ostream& out, double v) { put(out, v); }
std::uint16_t read_u16(std::istream& in) { return get<std::uint16_t>(in); }
std::uint32_t read_u32(std::istream& in) { return get<std::uint32_t>(in); }
std::uint64_t read_u64(std::istream& in) { return get<std::uint64_t>(in); }
float read_f32(std::istream& in) { return get<float>(in); }
double read_f64(std::istream& in) { return get<double>(in); }

void write_network(std::ostream& out, Network<float>& net) {
    out.write("SEIW", 4);
    write_u16(out, kSeiwVersion);
    write_u32(out, static_cast<std::uint32_t>(net.input_shape().size()));
    for (auto d : net.input_shape()) write_u32(out, static_cast<std::uint32_t>(d));
    write_u64(out, net.seed());
    write_u32(out, static_cast<std::uint32_t>(net.specs().size()));
    for (const auto& s : net.specs()) {
        out.put(static_cast<char>(s.kind));
        for (auto v : {s.out_channels, s.kernel_h, s.kernel_w, s.stride_h, s.stride_w, s.pad_h, s.pad_w, s.units,
                       s.window_h, s.window_w, s.vocab, s.dim})
            write_u32(out, v);
    }
    const auto params = net.parameters();
    write_u32(out, static_cast<std::uint32_t>(params.size()));
    for (auto* p : params) write_tensor(out, p->value);
}

Network<float> read_network(std::istream& in) {
    expect_magic(in, "SEIW");
    const auto version = read_u16(in);
    if (version != kSeiwVersion) throw IoError("checkpoint: unsupported SEIW version " + std::to_string(version));
    Shape input(read_u32(in));
    for (auto& d : input) d = read_u32(in);
    const auto seed = read_u64(in);
    std::vector<LayerSpec> specs(read_u32(in));
    for (auto& s : specs) {
        char kind = 0;
        if (!in.get(kind)) throw IoError("checkpoint: truncated layer table");
        s.kind = static_cast<LayerKind>(kind);
        for (auto* f : {&s.out_channels, &s.kernel_h, &s.kernel_w, &s.stride_h, &s.stride_w, &s.pad_h, &s.pad_w,
                        &s.units, &s.window_h, &s.window_w, &s.vocab, &s.dim})
            *f = read_u32(in);
    }
    Network<float> net(input, specs, seed);
    auto params = net.parameters();
    const auto count = read_u32(in);
    if (count != params.size())
        throw IoError("checkpoint: " + std::to_string(count) + " tensors for " + std::to_string(params.size()) +
                      " parameters");
    for (auto* p : params) {
        auto t = read_tensor(in);
        if (t.shape() != p->value.shape())
            throw IoError("checkpoint: tensor " + shape_str(t.shape()) + " does not fit parameter " +
                          shape_str(p->value.shape()));
        p->value = std::move(t);
    }
    return net;
}

void save_network(const std::filesystem::path& path, Network<float>& net) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string() + ": " + std::strerror(errno));
    write_network(out, net);
    if (!out) throw IoError("write failed on " + path.string());
}

Network<float> load_network(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string() + ": " + std::strerror(errno));
    return read_network(in);
}

void write_tensors(std::ostream& out, const std::vector<Tensor<float>>& tensors) {
    out.write("SEIT", 4);
    write_u32(out, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) write_tensor(out, t);
}

std::vector<Tensor<float>> read_tensors(std::istream& in) {
    expect_magic(in, "SEIT");
    std::vector<Tensor<float>> out(read_u32(in));
    for (auto& t : out) t = read_tensor(in);
    return out;
}

}  // namespace seilab::nn
