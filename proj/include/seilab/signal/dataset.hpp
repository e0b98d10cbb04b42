#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "seilab/signal/complex_sequence.hpp"
#include "seilab/signal/impairments.hpp"

namespace seilab {

/// One labeled preamble. `preamble_index` identifies the base (noise-free)
/// preamble within its emitter; it is kept in memory only.
struct PreambleRecord {
    int emitter_id = 0;
    double snr_db = 0.0;
    int realization = 1;
    ComplexSequence sequence;
    int preamble_index = -1;
};

struct DatasetManifest {
    std::vector<EmitterProfile> fleet;
    int per_emitter_count = 2000;
    int train_count_per_realization = 1600;
    std::vector<double> snr_grid;
    int realizations = 10;
    std::uint64_t seed = 0;
    /// Decimation factors for which X_L copies are produced (8, 4, 2 -> 2.5, 5, 10 MHz).
    std::vector<int> low_rate_factors{8, 4, 2};

    /// Throws std::invalid_argument describing the first violated invariant.
    void validate() const;
    int emitter_count() const { return static_cast<int>(fleet.size()); }
};

enum class Split { TrainHigh, TrainLow, Test };

/// Receives every generated record. `factor` is the decimation factor (1 for
/// full-rate records). Records arrive in a fixed order: emitter, SNR,
/// realization, preamble index.
using RecordSink = std::function<void(Split split, int factor, const PreambleRecord& rec)>;

/// Preamble indices placed in the training split for one emitter. The same
/// selection applies to every (SNR, realization) cell of that emitter so no
/// base preamble is shared between the splits.
std::vector<int> training_indices(const DatasetManifest& m, int emitter_id);

/// Base preamble `index` of an emitter before noise, normalized to unit power.
ComplexSequence base_preamble(const DatasetManifest& m, const EmitterProfile& emitter, int index);

/// Generates the full dataset and streams it to `sink`.
void build_dataset(const DatasetManifest& m, const RecordSink& sink);

/// Whole dataset held in memory.
struct Dataset {
    DatasetManifest manifest;
    std::vector<PreambleRecord> train_high;
    std::map<int, std::vector<PreambleRecord>> train_low;  ///< keyed by factor; aligned with train_high
    std::vector<PreambleRecord> test;                      ///< full rate
};

Dataset build_dataset_in_memory(const DatasetManifest& m);

// --- persistence ---------------------------------------------------------

inline constexpr std::uint16_t kSeirVersion = 1;

class SeirWriter {
public:
    explicit SeirWriter(const std::filesystem::path& path);

    void write(const PreambleRecord& rec);
    void close();
    std::size_t count() const { return count_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t count_ = 0;
};

std::vector<PreambleRecord> read_seir(const std::filesystem::path& path);

/// Serialize / parse the manifest as key=value text.
std::string manifest_to_text(const DatasetManifest& m);
DatasetManifest manifest_from_text(const std::string& text);

}  // namespace seilab
