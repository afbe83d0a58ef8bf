#pragma once

// Reactive traffic-steering baseline: waits for a congestion label to show
// up in telemetry, then moves the most-congested VNF's chains to the
// least-loaded feasible same-kind VNF.

#include <optional>
#include <utility>
#include <vector>

#include "orants/topology.hpp"
#include "orants/traffic.hpp"

namespace orants {

struct ReactiveConfig {
    int cooldown_minutes = 0; // minimum gap between issued steerings
};

class ReactivePolicy {
public:
    explicit ReactivePolicy(ReactiveConfig cfg = {}) : cfg_(cfg) {}

    /// Decide from observed labels at minute t; the returned steering takes
    /// effect at t + 1. NoTS (nullopt) when nothing is congested or no
    /// feasible destination exists.
    std::optional<std::pair<VnfId, VnfId>> react(int minute,
                                                 const std::vector<TelemetryRecord>& telemetry,
                                                 const Deployment& dep,
                                                 const SteeringConfig& steer_cfg) {
        if (last_steer_minute_ >= 0 && minute - last_steer_minute_ <= cfg_.cooldown_minutes &&
            cfg_.cooldown_minutes > 0)
            return std::nullopt;

        std::vector<std::uint8_t> observed(static_cast<std::size_t>(dep.n_vnfs()), 0);
        std::vector<double> utilization(static_cast<std::size_t>(dep.n_vnfs()), 0.0);
        for (const TelemetryRecord& rec : telemetry) {
            observed[static_cast<std::size_t>(rec.vnf_id)] = static_cast<std::uint8_t>(rec.congested);
            utilization[static_cast<std::size_t>(rec.vnf_id)] =
                rec.avg_packets_per_min /
                dep.vnfs[static_cast<std::size_t>(rec.vnf_id)].service_rate_ppm;
        }

        // Most congested observed VNF that still carries chains.
        VnfId src = -1;
        for (VnfId j = 0; j < dep.n_vnfs(); ++j) {
            if (!observed[static_cast<std::size_t>(j)]) continue;
            bool in_chain = false;
            for (const ServiceChain& c : dep.chains)
                if (c.contains(j)) in_chain = true;
            if (!in_chain) continue;
            if (src < 0 || utilization[static_cast<std::size_t>(j)] >
                               utilization[static_cast<std::size_t>(src)])
                src = j;
        }
        if (src < 0) return std::nullopt;

        // Least-loaded feasible same-kind destination; ties to lowest id.
        VnfId dst = -1;
        for (VnfId j = 0; j < dep.n_vnfs(); ++j) {
            if (j == src) continue;
            if (!steering_feasible(src, j, dep, observed, steer_cfg).ok) continue;
            if (dst < 0 ||
                utilization[static_cast<std::size_t>(j)] < utilization[static_cast<std::size_t>(dst)])
                dst = j;
        }
        if (dst < 0) return std::nullopt;

        last_steer_minute_ = minute;
        return std::make_pair(src, dst);
    }

private:
    ReactiveConfig cfg_;
    int last_steer_minute_ = -1;
};

} // namespace orants
