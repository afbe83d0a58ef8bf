#pragma once

// The O-RAN reinforcement-learning environment: state {S, L, C, P, t},
// the NoTS + VxV steering action space, the four-branch reward, and a
// one-minute-per-step traffic advance.

#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orants/csv.hpp"
#include "orants/error.hpp"
#include "orants/nbc.hpp"
#include "orants/scenario.hpp"
#include "orants/topology.hpp"
#include "orants/traffic.hpp"

namespace orants {

// ---------------------------------------------------------------------------
// congestion matrix (chains x VNFs)

struct CongestionMatrix {
    int n_chains = 0;
    int n_vnfs = 0;
    std::vector<std::uint8_t> cells; // row-major, chains x VNFs

    static CongestionMatrix from_flags(const std::vector<std::uint8_t>& vnf_flags,
                                       const std::vector<ServiceChain>& chains, int n_vnfs) {
        CongestionMatrix c;
        c.n_chains = static_cast<int>(chains.size());
        c.n_vnfs = n_vnfs;
        c.cells.assign(static_cast<std::size_t>(c.n_chains) * n_vnfs, 0);
        for (int i = 0; i < c.n_chains; ++i)
            for (VnfId m : chains[static_cast<std::size_t>(i)].members)
                if (vnf_flags[static_cast<std::size_t>(m)])
                    c.cells[static_cast<std::size_t>(i) * n_vnfs + m] = 1;
        return c;
    }

    std::uint8_t at(int chain, VnfId v) const {
        return cells[static_cast<std::size_t>(chain) * n_vnfs + v];
    }

    int sum() const {
        int s = 0;
        for (std::uint8_t c : cells) s += c;
        return s;
    }

    /// Congested in any chain row.
    bool vnf_congested(VnfId v) const {
        if (v < 0 || v >= n_vnfs) return false;
        for (int i = 0; i < n_chains; ++i)
            if (at(i, v)) return true;
        return false;
    }

    /// Member of two or more chains and congested in all of them.
    bool vnf_shared_congested(VnfId v) const {
        int rows = 0;
        for (int i = 0; i < n_chains; ++i)
            if (at(i, v)) ++rows;
        return rows >= 2;
    }

    /// Per-VNF column max, the compact view agents consume.
    std::vector<std::uint8_t> column_max() const {
        std::vector<std::uint8_t> f(static_cast<std::size_t>(n_vnfs), 0);
        for (int i = 0; i < n_chains; ++i)
            for (int j = 0; j < n_vnfs; ++j)
                if (at(i, j)) f[static_cast<std::size_t>(j)] = 1;
        return f;
    }
};

// ---------------------------------------------------------------------------
// actions

/// NoTS or Steer(src, dst), index-encoded as 0 or 1 + src * V + dst.
struct Action {
    bool is_steer = false;
    VnfId src = -1;
    VnfId dst = -1;

    static Action no_ts() { return {}; }
    static Action steer(VnfId src, VnfId dst) { return {true, src, dst}; }

    int index(int n_vnfs) const { return is_steer ? 1 + src * n_vnfs + dst : 0; }

    static Action from_index(int a, int n_vnfs) {
        if (a < 0 || a > n_vnfs * n_vnfs)
            throw Error(ErrorCategory::Internal, "action index out of range");
        if (a == 0) return no_ts();
        return steer((a - 1) / n_vnfs, (a - 1) % n_vnfs);
    }
};

inline int action_space_size(int n_vnfs) { return n_vnfs * n_vnfs + 1; }

// ---------------------------------------------------------------------------
// reward

struct RewardConfig {
    double sigma = 1.0;
    bool shared_vnf_multiplier_enabled = false;
    double shared_vnf_multiplier = 2.0;
};

/// Four-branch scalar reward: +sigma for an idle decision on a clean
/// network, -8 sigma for ignoring congestion, +10 sigma for steering a
/// congested source, -15 sigma for steering a clean one.
inline double reward(const Action& a, const CongestionMatrix& c, double sigma) {
    if (!a.is_steer) return c.sum() == 0 ? sigma : -8.0 * sigma;
    return c.vnf_congested(a.src) ? 10.0 * sigma : -15.0 * sigma;
}

/// Reward with the optional shared-VNF weighting on steer branches: when
/// the source belongs to two or more chains, both the payoff for relieving
/// it and the penalty for steering it needlessly scale up. Off by default.
inline double reward_ex(const Action& a, const CongestionMatrix& c, const RewardConfig& cfg,
                        int src_chain_membership = 0) {
    double r = reward(a, c, cfg.sigma);
    if (cfg.shared_vnf_multiplier_enabled && a.is_steer && src_chain_membership >= 2)
        r *= cfg.shared_vnf_multiplier;
    return r;
}

/// Sum of gamma^t * r_t over an episode; gamma in [0, 1).
inline double discounted_return(std::span<const double> rewards, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw Error(ErrorCategory::Config, "gamma must lie in [0,1)");
    double total = 0.0, g = 1.0;
    for (double r : rewards) {
        total += g * r;
        g *= gamma;
    }
    return total;
}

// ---------------------------------------------------------------------------
// observation and step outcome

struct Observation {
    std::shared_ptr<const ServerGraph> graph; // S (adjacency) and L (latencies)
    CongestionMatrix congestion;              // C
    Placement placement;                      // P
    std::vector<double> vnf_load;             // normalized [0,1], from last minute's queues
    int t = 0;
};

struct StepDiagnostics {
    bool attempted_steer = false;
    bool accepted = false;
    SteerReason reason = SteerReason::Ok;
    std::vector<double> queuing_delay_ms;  // per VNF, for the minute just simulated
    std::vector<double> chain_arrivals_ppm; // per chain, same minute
};

struct StepOutcome {
    Observation obs;
    double reward = 0.0;
    StepDiagnostics diag;
    bool done = false;
};

struct TraceRow {
    int t = 0;
    int action_index = 0;
    int src = -1;
    int dst = -1;
    int accepted = 0;
    double reward = 0.0;
    int sum_c = 0;
    double mean_delay_ms = 0.0;
};

inline void write_trace(const std::vector<TraceRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Data, "cannot write trace: " + path);
    out << "t,action_index,src,dst,accepted,reward,sum_C,mean_delay_ms\n";
    for (const TraceRow& r : rows)
        out << r.t << "," << r.action_index << "," << r.src << "," << r.dst << "," << r.accepted
            << "," << fmt_double(r.reward) << "," << r.sum_c << "," << fmt_double(r.mean_delay_ms)
            << "\n";
}

// ---------------------------------------------------------------------------
// environment

/// Produces per-VNF congestion flags for the upcoming minute from the
/// telemetry of the minute just finished.
using CongestionProvider = std::function<std::vector<std::uint8_t>(
    const std::vector<TelemetryRecord>& minute_telemetry,
    const std::vector<std::uint8_t>& previous_flags)>;

inline CongestionProvider nbc_provider(const NbcModelSet& models) {
    return [&models](const std::vector<TelemetryRecord>& tel,
                     const std::vector<std::uint8_t>& prev) {
        return predict_flags(models, tel, prev);
    };
}

/// Ground-truth provider: flags equal the observed congestion labels.
inline CongestionProvider label_provider() {
    return [](const std::vector<TelemetryRecord>& tel, const std::vector<std::uint8_t>& prev) {
        std::vector<std::uint8_t> flags(prev.size(), 0);
        if (flags.size() < tel.size()) flags.resize(tel.size(), 0);
        for (const TelemetryRecord& r : tel)
            flags[static_cast<std::size_t>(r.vnf_id)] = static_cast<std::uint8_t>(r.congested);
        return flags;
    };
}

struct EnvConfig {
    RewardConfig reward;
    std::uint64_t traffic_seed = 1;
    std::uint64_t placement_seed = 2;
};

class OranEnv {
public:
    OranEnv(Scenario scenario, CongestionProvider provider, EnvConfig cfg)
        : scenario_(std::move(scenario)), provider_(std::move(provider)), cfg_(cfg),
          sim_(scenario_.profiles, scenario_.traffic_params(), cfg.traffic_seed) {
        scenario_.validate();
        if (!provider_) throw Error(ErrorCategory::Config, "congestion provider required");
    }

    int n_vnfs() const { return scenario_.n_vnfs(); }
    int n_actions() const { return action_space_size(n_vnfs()); }
    const Scenario& scenario() const { return scenario_; }
    const Deployment& deployment() const { return dep_; }
    const std::vector<TraceRow>& trace() const { return trace_; }
    int t() const { return t_; }
    bool done() const { return t_ >= kMinutesPerDay; }

    Observation reset() {
        dep_ = make_deployment(scenario_, cfg_.placement_seed);
        graph_snapshot_ = std::make_shared<const ServerGraph>(dep_.graph);
        sim_.reset(dep_.n_vnfs());
        t_ = 0;
        trace_.clear();
        // No telemetry exists before the first minute, so the congestion
        // view starts all-clear; the provider takes over from minute 0's
        // telemetry onward.
        flags_.assign(static_cast<std::size_t>(dep_.n_vnfs()), 0);
        load_.assign(static_cast<std::size_t>(dep_.n_vnfs()), 0.0);
        return observation();
    }

    /// Reward against the congestion view at decision time, then apply the
    /// steering (feasible steers only; infeasible ones act as no-ops but
    /// are still rewarded), then simulate the minute and refresh C.
    StepOutcome step(const Action& action) {
        if (done()) throw Error(ErrorCategory::Internal, "step() on a finished episode");
        if (dep_.n_vnfs() == 0) throw Error(ErrorCategory::Internal, "reset() was not called");

        StepOutcome out;
        CongestionMatrix c = congestion_matrix();
        int membership = 0;
        if (action.is_steer)
            for (const ServiceChain& chain : dep_.chains)
                if (chain.contains(action.src)) ++membership;
        out.reward = reward_ex(action, c, cfg_.reward, membership);

        out.diag.attempted_steer = action.is_steer;
        if (action.is_steer) {
            FeasibilityCheck check =
                apply_steering(action.src, action.dst, dep_, flags_, scenario_.steering_config());
            out.diag.accepted = check.ok;
            out.diag.reason = check.reason;
        }

        TrafficSim::MinuteResult minute = sim_.step_minute(dep_, t_);
        out.diag.queuing_delay_ms = minute.queuing_delay_ms;
        out.diag.chain_arrivals_ppm = minute.chain_arrivals_ppm;
        flags_ = provider_(minute.telemetry, flags_);
        update_load(minute);

        double mean_delay = 0.0;
        for (double d : minute.queuing_delay_ms) mean_delay += d;
        mean_delay /= static_cast<double>(minute.queuing_delay_ms.size());
        trace_.push_back({t_, action.index(n_vnfs()), action.is_steer ? action.src : -1,
                          action.is_steer ? action.dst : -1, out.diag.accepted ? 1 : 0, out.reward,
                          c.sum(), mean_delay});

        ++t_;
        out.done = done();
        out.obs = observation();
        return out;
    }

    /// Feasible-action mask over the full space; index 0 (NoTS) is always 1.
    std::vector<std::uint8_t> action_mask() const {
        const int v = n_vnfs();
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(action_space_size(v)), 0);
        mask[0] = 1;
        for (VnfId src = 0; src < v; ++src)
            for (VnfId dst = 0; dst < v; ++dst)
                if (steering_feasible(src, dst, dep_, flags_, scenario_.steering_config()).ok)
                    mask[static_cast<std::size_t>(1 + src * v + dst)] = 1;
        return mask;
    }

    Observation observation() const {
        Observation obs;
        obs.graph = graph_snapshot_;
        obs.congestion = congestion_matrix();
        obs.placement = dep_.placement;
        obs.vnf_load = load_;
        obs.t = t_;
        return obs;
    }

    const std::vector<std::uint8_t>& congestion_flags() const { return flags_; }

private:
    CongestionMatrix congestion_matrix() const {
        return CongestionMatrix::from_flags(flags_, dep_.chains, dep_.n_vnfs());
    }

    void update_load(const TrafficSim::MinuteResult& minute) {
        const auto& queues = sim_.queues();
        for (std::size_t j = 0; j < queues.size(); ++j) {
            double rate = dep_.vnfs[j].service_rate_ppm;
            double load = (queues[j].served_this_min + queues[j].queue_len_packets) / (2.0 * rate);
            load_[j] = load < 1.0 ? load : 1.0;
        }
        (void)minute;
    }

    Scenario scenario_;
    CongestionProvider provider_;
    EnvConfig cfg_;
    TrafficSim sim_;
    Deployment dep_;
    std::shared_ptr<const ServerGraph> graph_snapshot_;
    std::vector<std::uint8_t> flags_;
    std::vector<double> load_;
    std::vector<TraceRow> trace_;
    int t_ = 0;
};

} // namespace orants
