#pragma once

// Gaussian Naive Bayes congestion classifier: one model per VNF over the
// two DCAE features (packets processed per minute, average latency),
// evaluated by ROC AUC and applied one minute ahead of time.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orants/error.hpp"
#include "orants/traffic.hpp"

namespace orants {

inline constexpr int kNbcFeatures = 2;

/// Diagonal-covariance Gaussian class-conditional model for two classes
/// (0 = not congested, 1 = congested).
struct NbcModel {
    std::array<double, 2> prior{0.5, 0.5};
    std::array<std::array<double, kNbcFeatures>, 2> mean{};
    std::array<std::array<double, kNbcFeatures>, 2> variance{};
};

struct LabeledSample {
    std::array<double, kNbcFeatures> x{};
    int label = 0;
};

/// Fit priors and per-class per-feature mean/variance (maximum likelihood).
/// Variances are floored at eps_var_rel times the overall feature variance
/// so constant features stay well-defined.
inline NbcModel fit(std::span<const LabeledSample> records, double eps_var_rel = 1e-9) {
    std::array<std::size_t, 2> count{0, 0};
    for (const LabeledSample& r : records) {
        if (r.label != 0 && r.label != 1)
            throw Error(ErrorCategory::Data, "labels must be 0 or 1");
        ++count[static_cast<std::size_t>(r.label)];
    }
    if (count[0] == 0 || count[1] == 0)
        throw Error(ErrorCategory::Data,
                    "training data contains a single class; widen the training window");

    NbcModel m;
    m.prior[0] = static_cast<double>(count[0]) / static_cast<double>(records.size());
    m.prior[1] = static_cast<double>(count[1]) / static_cast<double>(records.size());

    for (int c = 0; c < 2; ++c)
        for (int f = 0; f < kNbcFeatures; ++f) m.mean[c][f] = m.variance[c][f] = 0.0;

    for (const LabeledSample& r : records)
        for (int f = 0; f < kNbcFeatures; ++f)
            m.mean[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(f)] +=
                r.x[static_cast<std::size_t>(f)];
    for (int c = 0; c < 2; ++c)
        for (int f = 0; f < kNbcFeatures; ++f)
            m.mean[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] /=
                static_cast<double>(count[static_cast<std::size_t>(c)]);

    // Feature scale for the variance floor: overall (both-class) variance.
    std::array<double, kNbcFeatures> grand_mean{}, grand_var{};
    for (const LabeledSample& r : records)
        for (int f = 0; f < kNbcFeatures; ++f) grand_mean[static_cast<std::size_t>(f)] += r.x[static_cast<std::size_t>(f)];
    for (int f = 0; f < kNbcFeatures; ++f) grand_mean[static_cast<std::size_t>(f)] /= static_cast<double>(records.size());
    for (const LabeledSample& r : records)
        for (int f = 0; f < kNbcFeatures; ++f) {
            double d = r.x[static_cast<std::size_t>(f)] - grand_mean[static_cast<std::size_t>(f)];
            grand_var[static_cast<std::size_t>(f)] += d * d;
        }
    for (int f = 0; f < kNbcFeatures; ++f) grand_var[static_cast<std::size_t>(f)] /= static_cast<double>(records.size());

    for (const LabeledSample& r : records)
        for (int f = 0; f < kNbcFeatures; ++f) {
            double d = r.x[static_cast<std::size_t>(f)] -
                       m.mean[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(f)];
            m.variance[static_cast<std::size_t>(r.label)][static_cast<std::size_t>(f)] += d * d;
        }
    for (int c = 0; c < 2; ++c)
        for (int f = 0; f < kNbcFeatures; ++f) {
            double& var = m.variance[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
            var /= static_cast<double>(count[static_cast<std::size_t>(c)]);
            double floor = eps_var_rel * grand_var[static_cast<std::size_t>(f)];
            if (floor <= 0.0) floor = 1e-12;
            if (var < floor) var = floor;
        }
    return m;
}

/// Log density of x under the class-c diagonal Gaussian.
inline double log_class_density(const NbcModel& m, int c, std::array<double, kNbcFeatures> x) {
    double lp = 0.0;
    for (int f = 0; f < kNbcFeatures; ++f) {
        double var = m.variance[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
        double d = x[static_cast<std::size_t>(f)] - m.mean[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)];
        lp += -0.5 * std::log(2.0 * 3.14159265358979323846 * var) - d * d / (2.0 * var);
    }
    return lp;
}

/// Posterior probability of the congested class via Bayes' rule, computed
/// in log space and normalized; always in [0, 1].
inline double posterior(const NbcModel& m, std::array<double, kNbcFeatures> x) {
    for (double v : x)
        if (!std::isfinite(v)) throw Error(ErrorCategory::Data, "non-finite feature");
    double l0 = std::log(m.prior[0]) + log_class_density(m, 0, x);
    double l1 = std::log(m.prior[1]) + log_class_density(m, 1, x);
    double hi = std::max(l0, l1);
    double z0 = std::exp(l0 - hi), z1 = std::exp(l1 - hi);
    return z1 / (z0 + z1);
}

/// Arg-max classification; a tie is resolved toward congested.
inline int classify(const NbcModel& m, std::array<double, kNbcFeatures> x) {
    return posterior(m, x) >= 0.5 ? 1 : 0;
}

/// ROC AUC via the Mann-Whitney rank statistic with midrank tie handling.
inline double auc(std::span<const std::pair<double, int>> scores) {
    std::size_t n_pos = 0, n_neg = 0;
    for (const auto& [s, label] : scores) {
        if (label != 0 && label != 1) throw Error(ErrorCategory::Data, "labels must be 0 or 1");
        if (!std::isfinite(s)) throw Error(ErrorCategory::Data, "non-finite score");
        label == 1 ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw Error(ErrorCategory::Data, "AUC needs both classes present");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a].first < scores[b].first; });

    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]].first == scores[order[i]].first) ++j;
        double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j)); // 1-based
        for (std::size_t k = i; k < j; ++k)
            if (scores[order[k]].second == 1) rank_sum_pos += midrank;
        i = j;
    }
    double n_pos_d = static_cast<double>(n_pos);
    return (rank_sum_pos - n_pos_d * (n_pos_d + 1.0) / 2.0) / (n_pos_d * static_cast<double>(n_neg));
}

// ---------------------------------------------------------------------------
// per-VNF model set and day-ahead prediction

/// One model per VNF. VNFs that can never congest (backups, or anything
/// whose training window was all-clean) carry no model and always predict
/// clean.
struct NbcModelSet {
    int lead_minutes = 1;
    std::vector<std::optional<NbcModel>> models; // indexed by VNF id
    std::vector<double> test_auc;                // NaN where undefined
    double mean_test_auc = std::numeric_limits<double>::quiet_NaN();

    int n_vnfs() const { return static_cast<int>(models.size()); }
};

inline std::array<double, kNbcFeatures> telemetry_features(const TelemetryRecord& r) {
    return {r.avg_packets_per_min, r.avg_latency_ms};
}

/// Congestion flags for minute t + lead from the telemetry of minute t.
/// A VNF missing from the telemetry keeps its previous flag (and the
/// warning callback fires, when provided).
inline std::vector<std::uint8_t> predict_flags(
    const NbcModelSet& set, const std::vector<TelemetryRecord>& minute_telemetry,
    const std::vector<std::uint8_t>& previous_flags,
    const std::function<void(const std::string&)>& warn = nullptr) {
    const std::size_t v = set.models.size();
    std::vector<std::uint8_t> flags(v, 0);
    std::vector<std::uint8_t> seen(v, 0);
    for (const TelemetryRecord& rec : minute_telemetry) {
        std::size_t j = static_cast<std::size_t>(rec.vnf_id);
        if (j >= v) throw Error(ErrorCategory::Data, "telemetry for unknown VNF");
        seen[j] = 1;
        flags[j] = set.models[j]
                       ? static_cast<std::uint8_t>(classify(*set.models[j], telemetry_features(rec)))
                       : 0;
    }
    for (std::size_t j = 0; j < v; ++j) {
        if (!seen[j]) {
            flags[j] = j < previous_flags.size() ? previous_flags[j] : 0;
            if (warn) warn("missing telemetry for VNF " + std::to_string(j) + "; carrying flag over");
        }
    }
    return flags;
}

// ---------------------------------------------------------------------------
// persistence

inline void save_models(const NbcModelSet& set, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "orants-nbc-models";
    j["lead_minutes"] = set.lead_minutes;
    j["features"] = {"avg_packets_per_min", "avg_latency_ms"};
    nlohmann::json vnfs = nlohmann::json::array();
    for (std::size_t v = 0; v < set.models.size(); ++v) {
        nlohmann::json entry;
        entry["vnf_id"] = v;
        if (set.models[v]) {
            const NbcModel& m = *set.models[v];
            entry["prior"] = m.prior;
            entry["mean"] = m.mean;
            entry["variance"] = m.variance;
        } else {
            entry["degenerate"] = "always_clean";
        }
        if (v < set.test_auc.size() && std::isfinite(set.test_auc[v]))
            entry["test_auc"] = set.test_auc[v];
        vnfs.push_back(entry);
    }
    j["vnfs"] = vnfs;
    if (std::isfinite(set.mean_test_auc)) j["mean_test_auc"] = set.mean_test_auc;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write model file: " + path);
    out << j.dump(2) << "\n";
}

inline NbcModelSet load_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Data, "cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCategory::Data, "malformed model file: " + std::string(e.what()));
    }
    if (j.value("schema_version", 0) != 1)
        throw Error(ErrorCategory::Data, "unsupported model schema");
    NbcModelSet set;
    set.lead_minutes = j.at("lead_minutes").get<int>();
    const auto& vnfs = j.at("vnfs");
    set.models.resize(vnfs.size());
    set.test_auc.assign(vnfs.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& entry : vnfs) {
        std::size_t v = entry.at("vnf_id").get<std::size_t>();
        if (v >= set.models.size())
            throw Error(ErrorCategory::Data, "model vnf_id out of range");
        if (!entry.contains("degenerate")) {
            NbcModel m;
            m.prior = entry.at("prior").get<std::array<double, 2>>();
            m.mean = entry.at("mean").get<std::array<std::array<double, kNbcFeatures>, 2>>();
            m.variance = entry.at("variance").get<std::array<std::array<double, kNbcFeatures>, 2>>();
            if (!(m.prior[0] > 0.0 && m.prior[1] > 0.0 &&
                  std::abs(m.prior[0] + m.prior[1] - 1.0) < 1e-9))
                throw Error(ErrorCategory::Data, "model priors must be positive and sum to 1");
            for (int c = 0; c < 2; ++c)
                for (int f = 0; f < kNbcFeatures; ++f)
                    if (!(m.variance[static_cast<std::size_t>(c)][static_cast<std::size_t>(f)] > 0.0))
                        throw Error(ErrorCategory::Data, "model variances must be positive");
            set.models[v] = m;
        }
        if (entry.contains("test_auc")) set.test_auc[v] = entry.at("test_auc").get<double>();
    }
    set.mean_test_auc = j.value("mean_test_auc", std::numeric_limits<double>::quiet_NaN());
    return set;
}

} // namespace orants
