#include "seilab/eval/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "seilab/common.hpp"

namespace seilab {

namespace {

std::string fmt(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

bool same_snr(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

std::string method_name(Method m) {
    switch (m) {
        case Method::Cgan: return "cgan";
        case Method::CnnOnly: return "cnn_only";
        case Method::Lai: return "lai";
        case Method::Csi: return "csi";
        case Method::FullRate: return "full_rate";
    }
    return "?";
}

Method parse_method(const std::string& name) {
    for (auto m : {Method::Cgan, Method::CnnOnly, Method::Lai, Method::Csi, Method::FullRate})
        if (method_name(m) == name) return m;
    throw ConfigError("unknown method '" + name + "' (expected cgan, cnn_only, lai, csi or full_rate)");
}

TrainSnrMap::TrainSnrMap(std::vector<std::pair<double, double>> pairs) : pairs_(std::move(pairs)) {
    for (const auto& [test, train] : pairs_) {
        if (!std::isfinite(test) || !std::isfinite(train))
            throw ConfigError("train SNR map: entries must be finite");
        if (train > test)
            throw ConfigError("train SNR map: training SNR " + fmt(train, "%g") + " dB exceeds test SNR " +
                              fmt(test, "%g") + " dB");
    }
    for (std::size_t i = 0; i < pairs_.size(); ++i)
        for (std::size_t j = i + 1; j < pairs_.size(); ++j)
            if (same_snr(pairs_[i].first, pairs_[j].first))
                throw ConfigError("train SNR map: test SNR " + fmt(pairs_[i].first, "%g") + " dB listed twice");
}

TrainSnrMap TrainSnrMap::defaults() {
    return TrainSnrMap({{9, 9}, {12, 9}, {15, 9}, {18, 12}, {21, 15}, {24, 15}, {27, 15}, {30, 18}});
}

TrainSnrMap TrainSnrMap::identity(const std::vector<double>& grid) {
    std::vector<std::pair<double, double>> p;
    for (double s : grid) p.emplace_back(s, s);
    return TrainSnrMap(std::move(p));
}

double TrainSnrMap::train_snr(double test_snr) const {
    for (const auto& [test, train] : pairs_)
        if (same_snr(test, test_snr)) return train;
    throw ConfigError("train SNR map has no entry for test SNR " + fmt(test_snr, "%g") + " dB");
}

std::vector<double> TrainSnrMap::train_snrs() const {
    std::vector<double> out;
    for (const auto& p : pairs_)
        if (std::none_of(out.begin(), out.end(), [&](double s) { return same_snr(s, p.second); }))
            out.push_back(p.second);
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> EvalReport::cell(double snr, int emitter) const {
    auto it = cells.find({snr, emitter});
    if (it == cells.end()) return std::nullopt;
    return it->second;
}

std::optional<double> EvalReport::average(double snr) const {
    double sum = 0.0;
    int count = 0;
    for (int e : emitters)
        if (auto c = cell(snr, e)) {
            sum += *c;
            ++count;
        }
    if (count == 0) return std::nullopt;
    return sum / count;
}

std::optional<double> EvalReport::mean_over_snr() const {
    double sum = 0.0;
    int count = 0;
    for (double s : snr_grid)
        if (auto a = average(s)) {
            sum += *a;
            ++count;
        }
    if (count == 0) return std::nullopt;
    return sum / count;
}

EvalReport evaluate(const std::vector<Outcome>& outcomes, Method method, double f_low_hz,
                    const std::vector<double>& snr_grid, const std::vector<int>& emitters) {
    EvalReport r{method, f_low_hz, snr_grid, emitters, {}};
    std::map<std::pair<double, int>, std::pair<long, long>> tally;
    for (const auto& o : outcomes) {
        auto s = std::find_if(snr_grid.begin(), snr_grid.end(), [&](double g) { return same_snr(g, o.snr_db); });
        if (s == snr_grid.end())
            throw std::invalid_argument("evaluate: outcome at SNR " + fmt(o.snr_db, "%g") + " dB is off the grid");
        if (std::find(emitters.begin(), emitters.end(), o.emitter_id) == emitters.end())
            throw std::invalid_argument("evaluate: unknown emitter " + std::to_string(o.emitter_id));
        auto& t = tally[{*s, o.emitter_id}];
        t.first += o.predicted == o.emitter_id ? 1 : 0;
        t.second += 1;
    }
    for (const auto& [key, t] : tally) r.cells[key] = 100.0 * double(t.first) / double(t.second);
    return r;
}

std::string report_csv(const EvalReport& r, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash << '\n';
    os << "method,f_low_hz,snr_db,emitter_id,accuracy_pct\n";
    auto value = [](std::optional<double> v) { return v ? fmt(*v, "%.1f") : std::string("NA"); };
    for (double s : r.snr_grid) {
        for (int e : r.emitters)
            os << method_name(r.method) << ',' << fmt(r.f_low_hz, "%.0f") << ',' << fmt(s, "%g") << ',' << e << ','
               << value(r.cell(s, e)) << '\n';
        os << method_name(r.method) << ',' << fmt(r.f_low_hz, "%.0f") << ',' << fmt(s, "%g") << ",0,"
           << value(r.average(s)) << '\n';
    }
    return os.str();
}

std::string report_file_name(const EvalReport& r) {
    return "report_" + method_name(r.method) + "_" + fmt(r.f_low_hz / 1e3, "%.0f") + "khz.csv";
}

std::string plotdata_csv(const std::vector<EvalReport>& reports, const std::string& config_hash) {
    std::ostringstream os;
    os << "# config_hash=" << config_hash << '\n';
    os << "panel,series,method,f_low_hz,snr_db,accuracy_pct\n";
    auto emit = [&](const std::string& panel, const EvalReport& r) {
        const std::string series = method_name(r.method) + "@" + fmt(r.f_low_hz / 1e6, "%g") + "MHz";
        for (double s : r.snr_grid) {
            const auto a = r.average(s);
            os << panel << ',' << series << ',' << method_name(r.method) << ',' << fmt(r.f_low_hz, "%.0f") << ','
               << fmt(s, "%g") << ',' << (a ? fmt(*a, "%.1f") : std::string("NA")) << '\n';
        }
    };
    auto in = [](const EvalReport& r, std::initializer_list<Method> ms) {
        return std::find(ms.begin(), ms.end(), r.method) != ms.end();
    };
    for (const auto& r : reports)
        if (in(r, {Method::Cgan, Method::CnnOnly})) emit("cgan_vs_cnn_only", r);
    for (const auto& r : reports)
        if (in(r, {Method::Csi, Method::Lai})) emit("csi_vs_lai", r);
    for (const auto& r : reports)
        if (in(r, {Method::Cgan, Method::FullRate})) emit("cgan_vs_full_rate", r);
    for (const auto& r : reports)
        if (in(r, {Method::Csi, Method::FullRate})) emit("csi_vs_full_rate", r);
    return os.str();
}

}  // namespace seilab
