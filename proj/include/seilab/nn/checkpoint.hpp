#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "seilab/nn/network.hpp"

namespace seilab::nn {

inline constexpr std::uint16_t kSeiwVersion = 1;

/// Network block: magic "SEIW", u16 version, input shape, seed, layer table
/// (kind + 12 u32 hyperparameters per layer), then every parameter tensor as
/// u32 rank, u32 dims, little-endian f32 values. Blocks may be concatenated.
void write_network(std::ostream& out, Network<float>& net);
Network<float> read_network(std::istream& in);

void save_network(const std::filesystem::path& path, Network<float>& net);
Network<float> load_network(const std::filesystem::path& path);

/// Plain tensor list (magic "SEIT"), used for optimizer state.
void write_tensors(std::ostream& out, const std::vector<Tensor<float>>& tensors);
std::vector<Tensor<float>> read_tensors(std::istream& in);

/// Little-endian scalar helpers shared by the binary formats.
void write_u16(std::ostream& out, std::uint16_t v);
void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f32(std::ostream& out, float v);
void write_f64(std::ostream& out, double v);
std::uint16_t read_u16(std::istream& in);
std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
float read_f32(std::istream& in);
double read_f64(std::istream& in);

}  // namespace seilab::nn
