#include "seilab/signal/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "seilab/rng.hpp"
#include "seilab/signal/fir.hpp"
#include "seilab/signal/noise.hpp"
#include "seilab/signal/preamble.hpp"

namespace seilab {

namespace {

enum SeedStream : std::uint64_t { kImpairStream = 1, kNoiseStream = 2, kSplitStream = 3 };

}  // namespace

void DatasetManifest::validate() const {
    if (fleet.empty()) throw std::invalid_argument("manifest: fleet is empty");
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        if (fleet[i].emitter_id < 1 || fleet[i].emitter_id > static_cast<int>(fleet.size()))
            throw std::invalid_argument("manifest: emitter ids must be 1..R");
        for (std::size_t j = 0; j < i; ++j)
            if (fleet[j].emitter_id == fleet[i].emitter_id)
                throw std::invalid_argument("manifest: duplicate emitter id " + std::to_string(fleet[i].emitter_id));
        if (!fleet[i].all_finite()) throw std::invalid_argument("manifest: non-finite impairment");
    }
    if (per_emitter_count < 2) throw std::invalid_argument("manifest: per_emitter_count must be >= 2");
    if (train_count_per_realization < 1 || train_count_per_realization >= per_emitter_count)
        throw std::invalid_argument("manifest: train_count_per_realization must be in [1, per_emitter_count)");
    if (snr_grid.empty()) throw std::invalid_argument("manifest: snr_grid is empty");
    for (std::size_t i = 1; i < snr_grid.size(); ++i)
        if (!(snr_grid[i] > snr_grid[i - 1])) throw std::invalid_argument("manifest: snr_grid must be strictly increasing");
    if (realizations < 1) throw std::invalid_argument("manifest: realizations must be >= 1");
    for (int v : low_rate_factors)
        if (v < 1 || kPreambleLength % static_cast<std::size_t>(v) != 0)
            throw std::invalid_argument("manifest: low-rate factor " + std::to_string(v) + " does not divide 320");
}

std::vector<int> training_indices(const DatasetManifest& m, int emitter_id) {
    std::vector<int> idx(static_cast<std::size_t>(m.per_emitter_count));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(derive_seed(m.seed, {kSplitStream, static_cast<std::uint64_t>(emitter_id)}));
    rng.shuffle(idx.begin(), idx.end());
    idx.resize(static_cast<std::size_t>(m.train_count_per_realization));
    std::sort(idx.begin(), idx.end());
    return idx;
}

ComplexSequence base_preamble(const DatasetManifest& m, const EmitterProfile& emitter, int index) {
    static const ComplexSequence clean = synth_clean_preamble(kHighRateHz);
    const auto seed = derive_seed(m.seed, {kImpairStream, static_cast<std::uint64_t>(emitter.emitter_id),
                                           static_cast<std::uint64_t>(index)});
    return normalize_power(apply_impairments(clean, emitter, seed));
}

void build_dataset(const DatasetManifest& m, const RecordSink& sink) {
    m.validate();
    for (const auto& emitter : m.fleet) {
        const auto train = training_indices(m, emitter.emitter_id);
        std::vector<char> in_train(static_cast<std::size_t>(m.per_emitter_count), 0);
        for (int i : train) in_train[static_cast<std::size_t>(i)] = 1;

        std::vector<ComplexSequence> bases;
        bases.reserve(static_cast<std::size_t>(m.per_emitter_count));
        for (int i = 0; i < m.per_emitter_count; ++i) bases.push_back(base_preamble(m, emitter, i));

        for (std::size_t s = 0; s < m.snr_grid.size(); ++s) {
            for (int r = 1; r <= m.realizations; ++r) {
                for (int i = 0; i < m.per_emitter_count; ++i) {
                    const auto seed = derive_seed(
                        m.seed, {kNoiseStream, static_cast<std::uint64_t>(emitter.emitter_id),
                                 static_cast<std::uint64_t>(i), s, static_cast<std::uint64_t>(r)});
                    PreambleRecord rec{emitter.emitter_id, m.snr_grid[s], r,
                                       add_awgn(bases[static_cast<std::size_t>(i)], m.snr_grid[s], seed), i};
                    if (!in_train[static_cast<std::size_t>(i)]) {
                        sink(Split::Test, 1, rec);
                        continue;
                    }
                    sink(Split::TrainHigh, 1, rec);
                    for (int v : m.low_rate_factors) {
                        PreambleRecord low = rec;
                        low.sequence = decimate(rec.sequence, v);
                        sink(Split::TrainLow, v, low);
                    }
                }
            }
        }
    }
}

Dataset build_dataset_in_memory(const DatasetManifest& m) {
    Dataset ds;
    ds.manifest = m;
    build_dataset(m, [&](Split split, int factor, const PreambleRecord& rec) {
        switch (split) {
            case Split::TrainHigh: ds.train_high.push_back(rec); break;
            case Split::TrainLow: ds.train_low[factor].push_back(rec); break;
            case Split::Test: ds.test.push_back(rec); break;
        }
    });
    return ds;
}

// --- SEIR files ---------------------------------------------------------------

namespace {

template <typename T>
void put_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
bool get_le(std::istream& in, T& v) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) return false;
    if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
    std::memcpy(&v, buf, sizeof(T));
    return true;
}

}  // namespace

SeirWriter::SeirWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
    out_.write("SEIR", 4);
    put_le<std::uint16_t>(out_, kSeirVersion);
}

void SeirWriter::write(const PreambleRecord& rec) {
    put_le<std::uint16_t>(out_, static_cast<std::uint16_t>(rec.emitter_id));
    put_le<float>(out_, static_cast<float>(rec.snr_db));
    put_le<std::uint16_t>(out_, static_cast<std::uint16_t>(rec.realization));
    put_le<std::uint32_t>(out_, static_cast<std::uint32_t>(std::llround(rec.sequence.fs() / 1000.0)));
    put_le<std::uint32_t>(out_, static_cast<std::uint32_t>(rec.sequence.size()));
    for (const auto& z : rec.sequence.samples()) {
        put_le<float>(out_, static_cast<float>(z.real()));
        put_le<float>(out_, static_cast<float>(z.imag()));
    }
    if (!out_) throw IoError("write failed on " + path_.string() + ": " + std::strerror(errno));
    ++count_;
}

void SeirWriter::close() {
    out_.close();
    if (!out_) throw IoError("close failed on " + path_.string());
}

std::vector<PreambleRecord> read_seir(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
    char magic[4];
    std::uint16_t version = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, "SEIR", 4) != 0)
        throw IoError(path.string() + ": bad magic (not a SEIR dataset file)");
    if (!get_le(in, version) || version != kSeirVersion)
        throw IoError(path.string() + ": unsupported SEIR version " + std::to_string(version));
    std::vector<PreambleRecord> out;
    while (true) {
        std::uint16_t id = 0;
        if (!get_le(in, id)) break;
        float snr = 0;
        std::uint16_t realization = 0;
        std::uint32_t fs_khz = 0, length = 0;
        if (!get_le(in, snr) || !get_le(in, realization) || !get_le(in, fs_khz) || !get_le(in, length))
            throw IoError(path.string() + ": truncated record header");
        if (length == 0 || fs_khz == 0) throw IoError(path.string() + ": empty record");
        std::vector<cplx> samples(length);
        for (auto& z : samples) {
            float re = 0, im = 0;
            if (!get_le(in, re) || !get_le(in, im)) throw IoError(path.string() + ": truncated samples");
            z = cplx(re, im);
        }
        out.push_back(PreambleRecord{id, snr, realization, ComplexSequence(std::move(samples), fs_khz * 1000.0), -1});
    }
    return out;
}

// --- manifest text ------------------------------------------------------------

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::string manifest_to_text(const DatasetManifest& m) {
    std::ostringstream os;
    os << "# SEIR dataset manifest\n";
    os << "seed=" << m.seed << "\n";
    os << "emitters=" << m.fleet.size() << "\n";
    os << "per_emitter_count=" << m.per_emitter_count << "\n";
    os << "train_count_per_realization=" << m.train_count_per_realization << "\n";
    os << "realizations=" << m.realizations << "\n";
    os << "snr_grid=";
    for (std::size_t i = 0; i < m.snr_grid.size(); ++i) os << (i ? "," : "") << fmt(m.snr_grid[i]);
    os << "\nlow_rate_factors=";
    for (std::size_t i = 0; i < m.low_rate_factors.size(); ++i) os << (i ? "," : "") << m.low_rate_factors[i];
    os << "\n";
    for (const auto& e : m.fleet) {
        const std::string p = "emitter." + std::to_string(e.emitter_id) + ".";
        os << p << "iq_gain_imbalance_db=" << fmt(e.iq_gain_imbalance_db) << "\n";
        os << p << "iq_phase_imbalance_rad=" << fmt(e.iq_phase_imbalance_rad) << "\n";
        os << p << "cfo_hz=" << fmt(e.cfo_hz) << "\n";
        os << p << "phase_noise_std_rad=" << fmt(e.phase_noise_std_rad) << "\n";
        os << p << "dc_offset_i=" << fmt(e.dc_offset.real()) << "\n";
        os << p << "dc_offset_q=" << fmt(e.dc_offset.imag()) << "\n";
        os << p << "pa_gain_compression=" << fmt(e.pa_gain_compression) << "\n";
    }
    return os.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

}  // namespace

DatasetManifest manifest_from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("manifest: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw IoError("manifest: missing key '" + key + "'");
        return it->second;
    };
    DatasetManifest m;
    m.seed = std::stoull(need("seed"));
    const int emitters = std::stoi(need("emitters"));
    m.per_emitter_count = std::stoi(need("per_emitter_count"));
    m.train_count_per_realization = std::stoi(need("train_count_per_realization"));
    m.realizations = std::stoi(need("realizations"));
    m.snr_grid.clear();
    for (const auto& v : split_csv(need("snr_grid"))) m.snr_grid.push_back(std::stod(v));
    m.low_rate_factors.clear();
    for (const auto& v : split_csv(need("low_rate_factors"))) m.low_rate_factors.push_back(std::stoi(v));
    for (int id = 1; id <= emitters; ++id) {
        const std::string p = "emitter." + std::to_string(id) + ".";
        EmitterProfile e;
        e.emitter_id = id;
        e.iq_gain_imbalance_db = std::stod(need(p + "iq_gain_imbalance_db"));
        e.iq_phase_imbalance_rad = std::stod(need(p + "iq_phase_imbalance_rad"));
        e.cfo_hz = std::stod(need(p + "cfo_hz"));
        e.phase_noise_std_rad = std::stod(need(p + "phase_noise_std_rad"));
        e.dc_offset = cplx(std::stod(need(p + "dc_offset_i")), std::stod(need(p + "dc_offset_q")));
        e.pa_gain_compression = std::stod(need(p + "pa_gain_compression"));
        m.fleet.push_back(e);
    }
    return m;
}

}  // namespace seilab
