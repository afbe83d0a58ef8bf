#pragma once

// Experiment harness: builds NBC training data from a no-steering day,
// fits and evaluates the per-VNF models, trains the agent, and runs the
// paired agent-vs-baseline comparison that produces the final report.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "orants/baseline.hpp"
#include "orants/csv.hpp"
#include "orants/dqn.hpp"
#include "orants/env.hpp"
#include "orants/error.hpp"
#include "orants/nbc.hpp"
#include "orants/scenario.hpp"
#include "orants/traffic.hpp"

namespace orants {

struct Seeds {
    std::uint64_t traffic = 1;
    std::uint64_t placement = 2;
    std::uint64_t agent = 3;
};

// ---------------------------------------------------------------------------
// tabular artifacts

inline void write_telemetry_csv(const DayResult& day, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write telemetry: " + path);
    out << "minute,vnf_id,avg_packets_per_min,avg_latency_ms,congested\n";
    for (const TelemetryRecord& r : day.telemetry)
        out << r.minute << "," << r.vnf_id << "," << fmt_double(r.avg_packets_per_min) << ","
            << fmt_double(r.avg_latency_ms) << "," << r.congested << "\n";
}

inline std::vector<TelemetryRecord> load_telemetry_csv(const std::string& path) {
    std::string header;
    auto rows = read_csv(path, &header);
    if (header != "minute,vnf_id,avg_packets_per_min,avg_latency_ms,congested")
        throw Error(ErrorCategory::Data, "unexpected telemetry header in " + path);
    std::vector<TelemetryRecord> out;
    out.reserve(rows.size());
    for (const auto& f : rows) {
        if (f.size() != 5) throw Error(ErrorCategory::Data, "bad telemetry row in " + path);
        TelemetryRecord r;
        r.minute = static_cast<int>(parse_double(f[0]));
        r.vnf_id = static_cast<int>(parse_double(f[1]));
        r.avg_packets_per_min = parse_double(f[2]);
        r.avg_latency_ms = parse_double(f[3]);
        r.congested = static_cast<int>(parse_double(f[4]));
        out.push_back(r);
    }
    return out;
}

inline void write_delay_csv(const std::vector<double>& delay_minute_major, int n_vnfs,
                            const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write delays: " + path);
    out << "minute,vnf_id,queuing_delay_ms\n";
    for (std::size_t i = 0; i < delay_minute_major.size(); ++i)
        out << i / static_cast<std::size_t>(n_vnfs) << "," << i % static_cast<std::size_t>(n_vnfs)
            << "," << fmt_double(delay_minute_major[i]) << "\n";
}

inline std::vector<double> load_delay_csv(const std::string& path, int* n_vnfs_out = nullptr) {
    std::string header;
    auto rows = read_csv(path, &header);
    if (header != "minute,vnf_id,queuing_delay_ms")
        throw Error(ErrorCategory::Data, "unexpected delay header in " + path);
    int n_vnfs = 0;
    for (const auto& f : rows)
        n_vnfs = std::max(n_vnfs, static_cast<int>(parse_double(f[1])) + 1);
    std::vector<double> out(rows.size(), 0.0);
    for (const auto& f : rows) {
        if (f.size() != 3) throw Error(ErrorCategory::Data, "bad delay row in " + path);
        std::size_t idx = static_cast<std::size_t>(parse_double(f[0])) * n_vnfs +
                          static_cast<std::size_t>(parse_double(f[1]));
        if (idx >= out.size()) throw Error(ErrorCategory::Data, "delay row out of range in " + path);
        out[idx] = parse_double(f[2]);
    }
    if (n_vnfs_out) *n_vnfs_out = n_vnfs;
    return out;
}

/// Hash of the per-chain arrival trace; equal hashes mean two runs consumed
/// bit-identical traffic.
inline std::uint64_t traffic_trace_hash(const std::vector<double>& chain_arrival_trace) {
    std::string bytes;
    bytes.reserve(chain_arrival_trace.size() * 24);
    for (double v : chain_arrival_trace) {
        bytes += fmt_double(v);
        bytes += '\n';
    }
    return fnv1a_bytes(bytes);
}

// ---------------------------------------------------------------------------
// NBC training over a no-steering day

struct NbcTrainOutput {
    NbcModelSet models;
    DayResult day; // the telemetry the models were fitted on
};

/// Simulate a steering-free day, then fit one model per VNF mapping the
/// features of minute t to the congestion label of minute t + lead with a
/// chronological 70/30 split. VNFs whose training window never congests get
/// a degenerate always-clean entry; the test AUC is recorded per VNF where
/// both classes appear in the test window.
inline NbcTrainOutput train_nbc_models(const Scenario& sc, const Seeds& seeds) {
    Deployment dep = make_deployment(sc, seeds.placement);
    NbcTrainOutput out;
    out.day = simulate_day(dep, sc.profiles, sc.traffic_params(), seeds.traffic, nullptr,
                           sc.steering_config());

    const int v = sc.n_vnfs();
    const int lead = sc.params.nbc_lead_minutes;
    out.models.lead_minutes = lead;
    out.models.models.resize(static_cast<std::size_t>(v));
    out.models.test_auc.assign(static_cast<std::size_t>(v),
                               std::numeric_limits<double>::quiet_NaN());

    double auc_sum = 0.0;
    int auc_count = 0;
    for (int j = 0; j < v; ++j) {
        std::vector<LabeledSample> samples;
        samples.reserve(static_cast<std::size_t>(kMinutesPerDay - lead));
        for (int t = 0; t + lead < kMinutesPerDay; ++t) {
            const TelemetryRecord& now =
                out.day.telemetry[static_cast<std::size_t>(t) * v + static_cast<std::size_t>(j)];
            const TelemetryRecord& ahead =
                out.day.telemetry[static_cast<std::size_t>(t + lead) * v + static_cast<std::size_t>(j)];
            samples.push_back({telemetry_features(now), ahead.congested});
        }
        const std::size_t split = samples.size() * 7 / 10;
        std::span<const LabeledSample> train_set(samples.data(), split);
        std::span<const LabeledSample> test_set(samples.data() + split, samples.size() - split);

        bool any_positive_train = false;
        for (const LabeledSample& s : train_set) any_positive_train |= s.label == 1;
        if (!any_positive_train) {
            // Never congests in the training window (over-provisioned or
            // backup VNF): no model, always predicted clean.
            continue;
        }
        NbcModel model = fit(train_set);
        out.models.models[static_cast<std::size_t>(j)] = model;

        bool pos = false, neg = false;
        for (const LabeledSample& s : test_set) (s.label == 1 ? pos : neg) = true;
        if (pos && neg) {
            std::vector<std::pair<double, int>> scores;
            scores.reserve(test_set.size());
            for (const LabeledSample& s : test_set)
                scores.emplace_back(posterior(model, s.x), s.label);
            double a = auc(scores);
            out.models.test_auc[static_cast<std::size_t>(j)] = a;
            auc_sum += a;
            ++auc_count;
        }
    }
    if (auc_count > 0) out.models.mean_test_auc = auc_sum / auc_count;
    return out;
}

// ---------------------------------------------------------------------------
// comparison report

struct ComparisonReport {
    std::vector<double> per_vnf_baseline_mean_ms;
    std::vector<double> per_vnf_agent_mean_ms;
    double baseline_mean_ms = 0.0;
    double agent_mean_ms = 0.0;
    double improvement_pct = 0.0;
    double nbc_mean_auc = std::numeric_limits<double>::quiet_NaN();
    int convergence_episodes = -1; // 1-based count, -1 when unknown
    std::uint64_t traffic_hash = 0;
};

inline double percent_improvement(double baseline_mean, double agent_mean) {
    if (!(baseline_mean > 0.0))
        throw Error(ErrorCategory::Data, "baseline mean must be positive to compute improvement");
    return (baseline_mean - agent_mean) / baseline_mean * 100.0;
}

inline void write_report(const ComparisonReport& r, const std::string& dir) {
    std::ofstream csv(dir + "/report.csv", std::ios::binary);
    if (!csv) throw Error(ErrorCategory::Data, "cannot write report.csv");
    csv << "vnf_id,baseline_mean_delay_ms,agent_mean_delay_ms\n";
    for (std::size_t j = 0; j < r.per_vnf_baseline_mean_ms.size(); ++j)
        csv << j << "," << fmt_double(r.per_vnf_baseline_mean_ms[j]) << ","
            << fmt_double(r.per_vnf_agent_mean_ms[j]) << "\n";

    nlohmann::json j;
    j["schema_version"] = 1;
    j["baseline_mean_delay_ms"] = r.baseline_mean_ms;
    j["agent_mean_delay_ms"] = r.agent_mean_ms;
    j["improvement_pct"] = r.improvement_pct;
    if (std::isfinite(r.nbc_mean_auc)) j["nbc_mean_auc"] = r.nbc_mean_auc;
    j["convergence_episodes"] = r.convergence_episodes;
    j["traffic_hash"] = r.traffic_hash;
    j["per_vnf_baseline_mean_ms"] = r.per_vnf_baseline_mean_ms;
    j["per_vnf_agent_mean_ms"] = r.per_vnf_agent_mean_ms;
    std::ofstream js(dir + "/report.json", std::ios::binary);
    js << j.dump(2) << "\n";

    std::ofstream txt(dir + "/summary.txt", std::ios::binary);
    txt << "agent vs reactive baseline, paired traffic\n";
    txt << "  baseline mean queuing delay: " << fmt_double(r.baseline_mean_ms) << " ms\n";
    txt << "  agent mean queuing delay:    " << fmt_double(r.agent_mean_ms) << " ms\n";
    txt << "  improvement:                 " << fmt_double(r.improvement_pct) << " %\n";
    if (std::isfinite(r.nbc_mean_auc))
        txt << "  NBC mean test AUC:           " << fmt_double(r.nbc_mean_auc) << "\n";
    if (r.convergence_episodes > 0)
        txt << "  episodes to convergence:     " << r.convergence_episodes << "\n";
}

inline ComparisonReport load_report(const std::string& dir) {
    std::ifstream in(dir + "/report.json");
    if (!in) throw Error(ErrorCategory::Data, "cannot open report.json");
    nlohmann::json j;
    in >> j;
    ComparisonReport r;
    r.baseline_mean_ms = j.at("baseline_mean_delay_ms").get<double>();
    r.agent_mean_ms = j.at("agent_mean_delay_ms").get<double>();
    r.improvement_pct = j.at("improvement_pct").get<double>();
    r.nbc_mean_auc = j.value("nbc_mean_auc", std::numeric_limits<double>::quiet_NaN());
    r.convergence_episodes = j.value("convergence_episodes", -1);
    r.traffic_hash = j.at("traffic_hash").get<std::uint64_t>();
    r.per_vnf_baseline_mean_ms = j.at("per_vnf_baseline_mean_ms").get<std::vector<double>>();
    r.per_vnf_agent_mean_ms = j.at("per_vnf_agent_mean_ms").get<std::vector<double>>();
    return r;
}

// ---------------------------------------------------------------------------
// paired evaluation

struct EvalConfig {
    RewardConfig reward;
    ReactiveConfig reactive;
};

/// Run the trained greedy agent and the reactive baseline on identical
/// traffic (same seeds), write delay series, traces, and the report under
/// `outdir`, and return the comparison.
inline ComparisonReport run_evaluation(const Scenario& sc, const NbcModelSet& models,
                                       const Checkpoint& ck, const Seeds& seeds,
                                       const std::string& outdir, const EvalConfig& cfg = {}) {
    validate_checkpoint_for(ck, sc.n_vnfs(), sc.n_chains());
    std::filesystem::create_directories(outdir);
    const int v = sc.n_vnfs();

    // Baseline arm: reactive policy over observed labels.
    Deployment base_dep = make_deployment(sc, seeds.placement);
    ReactivePolicy reactive(cfg.reactive);
    SteeringConfig steer_cfg = sc.steering_config();
    std::vector<TraceRow> base_trace;
    DayResult base_day = simulate_day(
        base_dep, sc.profiles, sc.traffic_params(), seeds.traffic,
        [&](int minute, const std::vector<TelemetryRecord>& tel, const Deployment& dep)
            -> std::optional<std::pair<VnfId, VnfId>> {
            auto decision = reactive.react(minute, tel, dep, steer_cfg);
            TraceRow row;
            row.t = minute;
            int sum_c = 0;
            double mean_delay = 0.0;
            for (const TelemetryRecord& r : tel) sum_c += r.congested;
            for (const TelemetryRecord& r : tel)
                mean_delay += r.avg_latency_ms -
                              sc.params.proc_latency_ms[static_cast<std::size_t>(
                                  dep.vnfs[static_cast<std::size_t>(r.vnf_id)].kind)];
            row.mean_delay_ms = mean_delay / static_cast<double>(tel.size());
            row.sum_c = sum_c;
            if (decision) {
                Action a = Action::steer(decision->first, decision->second);
                row.action_index = a.index(v);
                row.src = decision->first;
                row.dst = decision->second;
                row.accepted = steering_feasible(decision->first, decision->second, dep,
                                                 [&] {
                                                     std::vector<std::uint8_t> ob(tel.size(), 0);
                                                     for (const TelemetryRecord& r : tel)
                                                         ob[static_cast<std::size_t>(r.vnf_id)] =
                                                             static_cast<std::uint8_t>(r.congested);
                                                     return ob;
                                                 }(),
                                                 steer_cfg)
                                   .ok
                               ? 1
                               : 0;
            } else {
                row.src = row.dst = -1;
            }
            base_trace.push_back(row);
            return decision;
        },
        steer_cfg);

    // Agent arm: greedy masked policy on the same traffic.
    OranEnv env(sc, nbc_provider(models), {cfg.reward, seeds.traffic, seeds.placement});
    FeatureEncoder encoder(ck.n_vnfs, ck.n_chains, ck.encoder_cfg);
    Rng greedy_rng(mix_seed(seeds.agent, 0x6576616cull));
    Observation obs = env.reset();
    std::vector<double> agent_delays;
    agent_delays.reserve(static_cast<std::size_t>(kMinutesPerDay) * v);
    std::vector<double> agent_chain_trace;
    agent_chain_trace.reserve(static_cast<std::size_t>(kMinutesPerDay) * sc.n_chains());
    while (!env.done()) {
        std::vector<std::uint8_t> mask = env.action_mask();
        int a = select_action(ck.net, encoder.encode(obs), mask, 0.0, greedy_rng);
        StepOutcome out = env.step(Action::from_index(a, v));
        agent_delays.insert(agent_delays.end(), out.diag.queuing_delay_ms.begin(),
                            out.diag.queuing_delay_ms.end());
        agent_chain_trace.insert(agent_chain_trace.end(), out.diag.chain_arrivals_ppm.begin(),
                                 out.diag.chain_arrivals_ppm.end());
        obs = std::move(out.obs);
    }

    ComparisonReport report;
    report.traffic_hash = traffic_trace_hash(base_day.chain_arrival_trace);
    std::uint64_t agent_hash = traffic_trace_hash(agent_chain_trace);
    if (agent_hash != report.traffic_hash)
        throw Error(ErrorCategory::Internal,
                    "paired evaluation violated: the two arms consumed different traffic");

    report.per_vnf_baseline_mean_ms.assign(static_cast<std::size_t>(v), 0.0);
    report.per_vnf_agent_mean_ms.assign(static_cast<std::size_t>(v), 0.0);
    for (int t = 0; t < kMinutesPerDay; ++t)
        for (int j = 0; j < v; ++j) {
            report.per_vnf_baseline_mean_ms[static_cast<std::size_t>(j)] +=
                base_day.queuing_delay_ms[static_cast<std::size_t>(t) * v + static_cast<std::size_t>(j)];
            report.per_vnf_agent_mean_ms[static_cast<std::size_t>(j)] +=
                agent_delays[static_cast<std::size_t>(t) * v + static_cast<std::size_t>(j)];
        }
    for (int j = 0; j < v; ++j) {
        report.per_vnf_baseline_mean_ms[static_cast<std::size_t>(j)] /= kMinutesPerDay;
        report.per_vnf_agent_mean_ms[static_cast<std::size_t>(j)] /= kMinutesPerDay;
        report.baseline_mean_ms += report.per_vnf_baseline_mean_ms[static_cast<std::size_t>(j)];
        report.agent_mean_ms += report.per_vnf_agent_mean_ms[static_cast<std::size_t>(j)];
    }
    report.baseline_mean_ms /= v;
    report.agent_mean_ms /= v;
    report.improvement_pct = percent_improvement(report.baseline_mean_ms, report.agent_mean_ms);
    report.nbc_mean_auc = models.mean_test_auc;
    report.convergence_episodes = ck.convergence_episode >= 0 ? ck.convergence_episode + 1 : -1;

    write_delay_csv(base_day.queuing_delay_ms, v, outdir + "/baseline_delays.csv");
    write_delay_csv(agent_delays, v, outdir + "/agent_delays.csv");
    write_trace(base_trace, outdir + "/baseline_trace.csv");
    write_trace(env.trace(), outdir + "/agent_trace.csv");
    write_report(report, outdir);
    return report;
}

} // namespace orants
