#pragma once

// Per-minute URLLC traffic generation, fluid VNF queues, and the day-long
// simulation loop that produces telemetry and queuing-delay series.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "orants/error.hpp"
#include "orants/rng.hpp"
#include "orants/topology.hpp"

namespace orants {

inline constexpr int kMinutesPerDay = 1440;

// ---------------------------------------------------------------------------
// traffic classes

enum class TrafficClassKind { ArVr = 0, AutonomousVehicle = 1, AutomatedIndustry = 2 };

inline const char* traffic_class_name(TrafficClassKind k) {
    switch (k) {
        case TrafficClassKind::ArVr: return "ar_vr";
        case TrafficClassKind::AutonomousVehicle: return "autonomous_vehicle";
        case TrafficClassKind::AutomatedIndustry: return "automated_industry";
    }
    return "?";
}

struct TrafficClass {
    TrafficClassKind name = TrafficClassKind::ArVr;
    double max_latency_ms = 0.0;
    double error_rate_lower = 0.0;
    double error_rate_upper = 0.0;

    void validate() const {
        if (!(error_rate_lower > 0.0 && error_rate_upper < 1.0 &&
              error_rate_lower <= error_rate_upper))
            throw Error(ErrorCategory::Scenario, "error-rate bounds must satisfy 0 < lo <= hi < 1");
        switch (name) {
            case TrafficClassKind::ArVr:
                if (max_latency_ms < 5.0 || max_latency_ms > 10.0)
                    throw Error(ErrorCategory::Scenario, "ar_vr latency must lie in [5,10] ms");
                if (error_rate_lower < 1e-5 || error_rate_upper > 1e-3)
                    throw Error(ErrorCategory::Scenario, "ar_vr error rate must lie in [1e-5,1e-3]");
                break;
            case TrafficClassKind::AutonomousVehicle:
                if (max_latency_ms < 5.0 || max_latency_ms > 10.0)
                    throw Error(ErrorCategory::Scenario,
                                "autonomous_vehicle latency must lie in [5,10] ms");
                if (error_rate_lower < 1e-3)
                    throw Error(ErrorCategory::Scenario,
                                "autonomous_vehicle error rate must be >= 1e-3");
                break;
            case TrafficClassKind::AutomatedIndustry:
                if (max_latency_ms != 1.0)
                    throw Error(ErrorCategory::Scenario, "automated_industry latency must be 1 ms");
                if (error_rate_lower < 1e-9 || error_rate_upper > 1e-5)
                    throw Error(ErrorCategory::Scenario,
                                "automated_industry error rate must lie in [1e-9,1e-5]");
                break;
        }
    }
};

// ---------------------------------------------------------------------------
// arrival profiles

struct GaussianPeak {
    double center_minute = 0.0;
    double width_minutes = 1.0;
    double amplitude_ppm = 0.0;
};

struct SpikeEvent {
    double start_minute = 0.0;
    double duration_minutes = 0.0;
    double multiplier = 1.0;
};

/// Diurnal arrival-rate shape for one chain. noise_seed = 0 disables noise.
struct ArrivalProfile {
    double base_rate_ppm = 0.0;
    std::vector<GaussianPeak> peaks;
    std::vector<SpikeEvent> spikes;
    std::uint64_t noise_seed = 0;
};

/// Deterministic part of the rate: (base + gaussian bumps) scaled by every
/// active spike multiplier, clamped at zero. Defined for fractional t.
inline double profile_rate(const ArrivalProfile& p, double t) {
    double rate = p.base_rate_ppm;
    for (const GaussianPeak& peak : p.peaks) {
        double z = (t - peak.center_minute) / peak.width_minutes;
        rate += peak.amplitude_ppm * std::exp(-0.5 * z * z);
    }
    for (const SpikeEvent& s : p.spikes)
        if (t >= s.start_minute && t < s.start_minute + s.duration_minutes) rate *= s.multiplier;
    return rate > 0.0 ? rate : 0.0;
}

/// Arrival rate at an integer minute, with seeded noise whose variance
/// scales with the rate (Poisson-like). Deterministic in (profile, t).
inline double arrival_rate(const ArrivalProfile& p, int t) {
    if (t < 0 || t >= kMinutesPerDay)
        throw Error(ErrorCategory::Internal, "minute out of range: " + std::to_string(t));
    double rate = profile_rate(p, static_cast<double>(t));
    if (p.noise_seed != 0) {
        double z = counter_normal(p.noise_seed, static_cast<std::uint64_t>(t));
        rate += z * std::sqrt(rate);
        if (rate < 0.0) rate = 0.0;
    }
    return rate;
}

// ---------------------------------------------------------------------------
// per-VNF queues

struct VnfQueueState {
    double queue_len_packets = 0.0;
    double arrivals_this_min = 0.0;
    double served_this_min = 0.0;
    double dropped_this_min = 0.0;
};

struct QueueStepResult {
    VnfQueueState state;
    double queuing_delay_ms = 0.0;
};

/// Fluid queue update for one minute. Packets beyond the buffer limit are
/// dropped; the queuing delay is the time the end-of-minute backlog needs
/// to drain at the service rate.
inline QueueStepResult step_queue(const VnfQueueState& s, double arrivals,
                                  double service_rate_ppm, double buffer_limit_packets) {
    if (!std::isfinite(arrivals) || !std::isfinite(service_rate_ppm) ||
        !std::isfinite(s.queue_len_packets))
        throw Error(ErrorCategory::Internal, "non-finite queue input");
    if (arrivals < 0.0) throw Error(ErrorCategory::Internal, "negative arrivals");
    if (!(service_rate_ppm > 0.0)) throw Error(ErrorCategory::Internal, "service rate must be > 0");

    const double pre = s.queue_len_packets + arrivals;
    const double served = pre <= service_rate_ppm ? pre : service_rate_ppm;
    const double backlog = pre - served; // exactly 0 when everything was served
    const double dropped = backlog > buffer_limit_packets ? backlog - buffer_limit_packets : 0.0;
    const double queue = backlog - dropped;

    QueueStepResult out;
    out.state.queue_len_packets = queue;
    out.state.arrivals_this_min = arrivals;
    out.state.served_this_min = served;
    out.state.dropped_this_min = dropped;
    out.queuing_delay_ms = queue / service_rate_ppm * 60000.0;
    return out;
}

/// Ground-truth congestion rule: processed packets above rho * capacity.
inline int congestion_label(double avg_packets_per_min, double service_rate_ppm,
                            double rho_threshold) {
    return avg_packets_per_min > rho_threshold * service_rate_ppm ? 1 : 0;
}

// ---------------------------------------------------------------------------
// telemetry

/// One DCAE-style aggregate for one VNF and one minute.
struct TelemetryRecord {
    int vnf_id = 0;
    int minute = 0;
    double avg_packets_per_min = 0.0; // packets processed during the minute
    double avg_latency_ms = 0.0;      // queuing delay + per-kind processing constant
    int congested = 0;
};

struct TrafficParams {
    double rho_threshold = 0.9;
    double buffer_minutes = 60.0; // buffer limit = buffer_minutes * service rate
    std::array<double, 3> proc_latency_ms{0.1, 0.15, 0.2}; // per VnfKind
};

// ---------------------------------------------------------------------------
// minute-by-minute simulation

/// Evolves all VNF queues one minute at a time. Chain arrivals are drawn
/// from per-chain profiles addressed by (seed, chain, minute), so traces do
/// not depend on how many times or in what order other streams were drawn.
class TrafficSim {
public:
    TrafficSim(std::vector<ArrivalProfile> per_chain_profiles, TrafficParams params,
               std::uint64_t traffic_seed)
        : profiles_(std::move(per_chain_profiles)), params_(params), seed_(traffic_seed) {}

    void reset(int n_vnfs) { queues_.assign(static_cast<std::size_t>(n_vnfs), VnfQueueState{}); }

    struct MinuteResult {
        std::vector<TelemetryRecord> telemetry;  // one per VNF
        std::vector<double> queuing_delay_ms;    // one per VNF
        std::vector<double> chain_arrivals_ppm;  // one per chain
    };

    /// Rate offered to each chain at `minute`; whole packets.
    std::vector<double> chain_arrivals(const Deployment& dep, int minute) const {
        std::vector<double> arrivals(static_cast<std::size_t>(dep.n_chains()), 0.0);
        for (int c = 0; c < dep.n_chains(); ++c) {
            ArrivalProfile p = profiles_[static_cast<std::size_t>(c)];
            if (p.noise_seed != 0) p.noise_seed = mix_seed(seed_, p.noise_seed);
            arrivals[static_cast<std::size_t>(c)] = std::round(arrival_rate(p, minute));
        }
        return arrivals;
    }

    MinuteResult step_minute(Deployment& dep, int minute) {
        if (queues_.size() != static_cast<std::size_t>(dep.n_vnfs()))
            throw Error(ErrorCategory::Internal, "TrafficSim::reset was not called");
        MinuteResult out;
        out.chain_arrivals_ppm = chain_arrivals(dep, minute);

        std::vector<double> vnf_arrivals(static_cast<std::size_t>(dep.n_vnfs()), 0.0);
        for (int c = 0; c < dep.n_chains(); ++c)
            for (VnfId m : dep.chains[static_cast<std::size_t>(c)].members)
                vnf_arrivals[static_cast<std::size_t>(m)] += out.chain_arrivals_ppm[static_cast<std::size_t>(c)];
        dep.vnf_traffic_ppm = vnf_arrivals;

        out.telemetry.reserve(queues_.size());
        out.queuing_delay_ms.resize(queues_.size());
        for (std::size_t j = 0; j < queues_.size(); ++j) {
            const Vnf& v = dep.vnfs[j];
            QueueStepResult r = step_queue(queues_[j], vnf_arrivals[j], v.service_rate_ppm,
                                           params_.buffer_minutes * v.service_rate_ppm);
            queues_[j] = r.state;
            out.queuing_delay_ms[j] = r.queuing_delay_ms;

            TelemetryRecord rec;
            rec.vnf_id = static_cast<int>(j);
            rec.minute = minute;
            rec.avg_packets_per_min = r.state.served_this_min;
            rec.avg_latency_ms =
                r.queuing_delay_ms + params_.proc_latency_ms[static_cast<std::size_t>(v.kind)];
            rec.congested =
                congestion_label(rec.avg_packets_per_min, v.service_rate_ppm, params_.rho_threshold);
            out.telemetry.push_back(rec);
        }
        return out;
    }

    const std::vector<VnfQueueState>& queues() const { return queues_; }
    const TrafficParams& params() const { return params_; }
    const std::vector<ArrivalProfile>& profiles() const { return profiles_; }
    std::uint64_t seed() const { return seed_; }

private:
    std::vector<ArrivalProfile> profiles_;
    TrafficParams params_;
    std::uint64_t seed_ = 0;
    std::vector<VnfQueueState> queues_;
};

// ---------------------------------------------------------------------------
// whole-day run

struct DayResult {
    std::vector<TelemetryRecord> telemetry;      // minute-major, V records per minute
    std::vector<double> queuing_delay_ms;        // [minute * V + vnf]
    std::vector<double> chain_arrival_trace;     // [minute * K + chain]
    int n_vnfs = 0;
    int n_chains = 0;

    double delay(int minute, VnfId v) const {
        return queuing_delay_ms[static_cast<std::size_t>(minute) * n_vnfs + v];
    }
};

/// Steering decision requested by a policy after observing minute t.
using SteeringHook = std::function<std::optional<std::pair<VnfId, VnfId>>(
    int minute, const std::vector<TelemetryRecord>& minute_telemetry, const Deployment& dep)>;

/// Run a full simulated day. The hook runs after each minute's telemetry is
/// known; an accepted steering takes effect from the next minute. Feasibility
/// for hook steerings is gated on the observed congestion labels.
inline DayResult simulate_day(Deployment& dep, const std::vector<ArrivalProfile>& profiles,
                              const TrafficParams& params, std::uint64_t traffic_seed,
                              const SteeringHook& hook, const SteeringConfig& steer_cfg) {
    if (profiles.size() != static_cast<std::size_t>(dep.n_chains()))
        throw Error(ErrorCategory::Scenario, "one arrival profile per chain required");
    TrafficSim sim(profiles, params, traffic_seed);
    sim.reset(dep.n_vnfs());

    DayResult day;
    day.n_vnfs = dep.n_vnfs();
    day.n_chains = dep.n_chains();
    day.telemetry.reserve(static_cast<std::size_t>(kMinutesPerDay) * day.n_vnfs);
    day.queuing_delay_ms.reserve(day.telemetry.capacity());
    day.chain_arrival_trace.reserve(static_cast<std::size_t>(kMinutesPerDay) * day.n_chains);

    for (int t = 0; t < kMinutesPerDay; ++t) {
        TrafficSim::MinuteResult r = sim.step_minute(dep, t);
        day.telemetry.insert(day.telemetry.end(), r.telemetry.begin(), r.telemetry.end());
        day.queuing_delay_ms.insert(day.queuing_delay_ms.end(), r.queuing_delay_ms.begin(),
                                    r.queuing_delay_ms.end());
        day.chain_arrival_trace.insert(day.chain_arrival_trace.end(), r.chain_arrivals_ppm.begin(),
                                       r.chain_arrivals_ppm.end());
        if (hook) {
            if (auto steer = hook(t, r.telemetry, dep)) {
                std::vector<std::uint8_t> observed(r.telemetry.size(), 0);
                for (const TelemetryRecord& rec : r.telemetry)
                    observed[static_cast<std::size_t>(rec.vnf_id)] =
                        static_cast<std::uint8_t>(rec.congested);
                apply_steering(steer->first, steer->second, dep, observed, steer_cfg);
            }
        }
    }
    return day;
}

} // namespace orants
