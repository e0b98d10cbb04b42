#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace seilab {

enum class Method { Cgan, CnnOnly, Lai, Csi, FullRate };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Test SNR to the SNR whose training data builds the classifier.
class TrainSnrMap {
public:
    TrainSnrMap() = default;
    explicit TrainSnrMap(std::vector<std::pair<double, double>> pairs);

    /// 9->9, 12->9, 15->9, 18->12, 21->15, 24->15, 27->15, 30->18.
    static TrainSnrMap defaults();
    /// Every test SNR trains at itself.
    static TrainSnrMap identity(const std::vector<double>& grid);

    double train_snr(double test_snr) const;
    const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }
    std::vector<double> train_snrs() const;  ///< distinct, ascending

private:
    std::vector<std::pair<double, double>> pairs_;
};

/// One prediction on a test record.
struct Outcome {
    int emitter_id = 0;
    double snr_db = 0.0;
    int predicted = 0;
};

struct EvalReport {
    Method method = Method::FullRate;
    double f_low_hz = 0.0;
    std::vector<double> snr_grid;
    std::vector<int> emitters;
    /// (snr, emitter) -> percent correct; absent when the cell had no records.
    std::map<std::pair<double, int>, double> cells;

    std::optional<double> cell(double snr, int emitter) const;
    /// Arithmetic mean of the present per-emitter cells at one SNR.
    std::optional<double> average(double snr) const;
    /// Mean of the per-SNR averages.
    std::optional<double> mean_over_snr() const;
};

/// Accuracy per (SNR, emitter) cell, pooled over realizations and preambles.
EvalReport evaluate(const std::vector<Outcome>& outcomes, Method method, double f_low_hz,
                    const std::vector<double>& snr_grid, const std::vector<int>& emitters);

/// CSV: method,f_low_hz,snr_db,emitter_id,accuracy_pct with emitter_id 0 for
/// the average. Missing cells print as NA. The first line carries the config hash.
std::string report_csv(const EvalReport& r, const std::string& config_hash);
std::string report_file_name(const EvalReport& r);

/// Plot-ready series grouped into panels: cgan vs cnn_only, csi vs lai, and
/// upsampled vs full rate.
std::string plotdata_csv(const std::vector<EvalReport>& reports, const std::string& config_hash);

}  // namespace seilab
