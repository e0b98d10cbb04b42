#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "seilab/config/experiment_config.hpp"
#include "seilab/nn/network.hpp"

namespace seilab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitPrerequisite = 3;
inline constexpr int kExitNumeric = 4;

/// Runs one `seilab` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// On-disk layout below the configured output directory.
struct Layout {
    std::filesystem::path root;

    std::filesystem::path dataset_dir() const { return root / "dataset"; }
    std::filesystem::path manifest() const { return dataset_dir() / "manifest.txt"; }
    std::filesystem::path summary() const { return dataset_dir() / "summary.csv"; }
    std::filesystem::path train_high() const { return dataset_dir() / "train_high.seir"; }
    std::filesystem::path train_low(int factor) const;
    std::filesystem::path test() const { return dataset_dir() / "test.seir"; }
    std::filesystem::path checkpoints() const { return root / "checkpoints"; }
    std::filesystem::path cgan(double f_low_hz) const;
    std::filesystem::path cgan_state(double f_low_hz) const;
    std::filesystem::path cgan_log(double f_low_hz) const;
    std::filesystem::path classifier(std::size_t width, double train_snr) const;
    std::filesystem::path classifier_log(std::size_t width, double train_snr) const;
    std::filesystem::path resampled(const std::string& method, double f_low_hz) const;
    std::filesystem::path reports() const { return root / "reports"; }
    std::filesystem::path spectro() const { return root / "spectro"; }
};

/// Classifier checkpoint: magic "SEIC", u16 version, tag, width, training SNR, network.
void save_classifier(const std::filesystem::path& path, nn::Network<float>& net, std::size_t width, double train_snr,
                     const std::string& tag);
nn::Network<float> load_classifier(const std::filesystem::path& path);

/// Dataset written by `generate`, read back into memory.
Dataset load_dataset(const Layout& layout);

}  // namespace seilab::cli
