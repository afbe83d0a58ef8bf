#pragma once

// Server infrastructure, VNF inventory, service chains, and the steering
// rules that decide whether traffic may be re-targeted between VNFs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "orants/error.hpp"
#include "orants/rng.hpp"

namespace orants {

using VnfId = int;
using ServerId = int;

inline constexpr double kInfLatency = std::numeric_limits<double>::infinity();

enum class VnfKind { NearRtRic = 0, OCU = 1, ODU = 2 };

inline const char* vnf_kind_name(VnfKind k) {
    switch (k) {
        case VnfKind::NearRtRic: return "nearrt_ric";
        case VnfKind::OCU: return "ocu";
        case VnfKind::ODU: return "odu";
    }
    return "?";
}

/// COTS server infrastructure: symmetric adjacency, per-link latencies,
/// and per-server reliability (MTTF) and CPU capacity.
struct ServerGraph {
    int n_servers = 0;
    std::vector<std::uint8_t> adjacency;      // n x n, row-major, 1 = usable link
    std::vector<double> link_latency_ms;      // n x n, meaningful only where adjacency = 1
    std::vector<double> mttf_hours;           // per server
    std::vector<double> cpu_capacity;         // per server, abstract units

    std::size_t idx(ServerId i, ServerId j) const {
        return static_cast<std::size_t>(i) * n_servers + j;
    }

    bool connected(ServerId i, ServerId j) const { return adjacency[idx(i, j)] != 0; }

    /// Latency of the direct link i-j; +inf when no link exists. i == j is 0.
    double latency(ServerId i, ServerId j) const {
        if (i == j) return 0.0;
        return connected(i, j) ? link_latency_ms[idx(i, j)] : kInfLatency;
    }

    void validate() const {
        if (n_servers <= 0) throw Error(ErrorCategory::Scenario, "server graph is empty");
        const std::size_t n2 = static_cast<std::size_t>(n_servers) * n_servers;
        if (adjacency.size() != n2 || link_latency_ms.size() != n2)
            throw Error(ErrorCategory::Scenario, "adjacency/latency matrix size mismatch");
        if (mttf_hours.size() != static_cast<std::size_t>(n_servers) ||
            cpu_capacity.size() != static_cast<std::size_t>(n_servers))
            throw Error(ErrorCategory::Scenario, "per-server vector size mismatch");
        for (int i = 0; i < n_servers; ++i) {
            if (adjacency[idx(i, i)] != 0)
                throw Error(ErrorCategory::Scenario,
                            "adjacency diagonal must be zero (server " + std::to_string(i) + ")");
            if (!(mttf_hours[i] > 0.0))
                throw Error(ErrorCategory::Scenario,
                            "mttf_hours must be positive (server " + std::to_string(i) + ")");
            if (!(cpu_capacity[i] > 0.0))
                throw Error(ErrorCategory::Scenario,
                            "cpu_capacity must be positive (server " + std::to_string(i) + ")");
            for (int j = 0; j < n_servers; ++j) {
                if (adjacency[idx(i, j)] != adjacency[idx(j, i)])
                    throw Error(ErrorCategory::Scenario,
                                "adjacency must be symmetric (" + std::to_string(i) + "," +
                                    std::to_string(j) + ")");
                if (adjacency[idx(i, j)] && !(link_latency_ms[idx(i, j)] > 0.0))
                    throw Error(ErrorCategory::Scenario,
                                "link latency must be positive on active link (" +
                                    std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
};

struct Vnf {
    VnfId id = 0;
    VnfKind kind = VnfKind::NearRtRic;
    double service_rate_ppm = 0.0; // packets processable per minute
    double cpu_demand = 0.0;
    bool backup = false;           // placed for resilience, never carries traffic
};

/// VNF id -> host server. Deployment footprints are static: steering moves
/// traffic between VNFs, never the VNFs themselves.
struct Placement {
    std::vector<ServerId> host_of;

    ServerId host(VnfId v) const {
        if (v < 0 || static_cast<std::size_t>(v) >= host_of.size())
            throw Error(ErrorCategory::Internal, "unknown VNF id " + std::to_string(v));
        return host_of[static_cast<std::size_t>(v)];
    }
};

/// Ordered (near-RT RIC, O-CU, O-DU) triple delivering one service.
struct ServiceChain {
    int id = 0;
    std::array<VnfId, 3> members{}; // slot 0 = NearRtRic, 1 = OCU, 2 = ODU
    double latency_bound_ms = 0.0;
    double reliability_bound = 0.0; // error-rate upper bound in (0,1)

    bool contains(VnfId v) const {
        return members[0] == v || members[1] == v || members[2] == v;
    }
};

struct PlacementRequest {
    std::vector<Vnf> primaries;
    std::vector<Vnf> backups;
    double hop_latency_budget_ms = kInfLatency;
    // Optional per-VNF upstream hint (indexed by VNF id, -1 = none), derived
    // from declared chains. When absent, tiers pair by placement order.
    std::vector<VnfId> upstream_of;
};

/// Everything the simulator mutates while a day runs. `vnf_traffic_ppm` is
/// the traffic each VNF received in the most recent simulated minute; a
/// VNF's CPU load is its deployment footprint scaled by utilization.
struct Deployment {
    ServerGraph graph;
    std::vector<Vnf> vnfs;
    Placement placement;
    std::vector<ServiceChain> chains;
    std::vector<double> vnf_traffic_ppm;

    const Vnf& vnf(VnfId v) const {
        if (v < 0 || static_cast<std::size_t>(v) >= vnfs.size())
            throw Error(ErrorCategory::Internal, "unknown VNF id " + std::to_string(v));
        return vnfs[static_cast<std::size_t>(v)];
    }

    int n_vnfs() const { return static_cast<int>(vnfs.size()); }
    int n_chains() const { return static_cast<int>(chains.size()); }

    double traffic_of(VnfId v) const {
        return static_cast<std::size_t>(v) < vnf_traffic_ppm.size()
                   ? vnf_traffic_ppm[static_cast<std::size_t>(v)]
                   : 0.0;
    }

    /// CPU in use by one VNF right now: footprint x utilization, capped at
    /// the footprint when the VNF is saturated.
    double cpu_load(VnfId v) const {
        const Vnf& f = vnfs[static_cast<std::size_t>(v)];
        double util = traffic_of(v) / f.service_rate_ppm;
        if (util > 1.0) util = 1.0;
        return f.cpu_demand * util;
    }

    std::vector<double> server_cpu_loads() const {
        std::vector<double> load(static_cast<std::size_t>(graph.n_servers), 0.0);
        for (std::size_t v = 0; v < vnfs.size(); ++v)
            load[static_cast<std::size_t>(placement.host_of[v])] += cpu_load(static_cast<VnfId>(v));
        return load;
    }
};

// ---------------------------------------------------------------------------
// chain latency

/// Sum of direct link latencies over consecutive member pairs. Co-located
/// members contribute 0; an unreachable hop makes the result +inf.
inline double chain_latency(const ServiceChain& chain, const Placement& placement,
                            const ServerGraph& graph) {
    double total = 0.0;
    for (int hop = 0; hop < 2; ++hop) {
        ServerId a = placement.host(chain.members[static_cast<std::size_t>(hop)]);
        ServerId b = placement.host(chain.members[static_cast<std::size_t>(hop) + 1]);
        total += graph.latency(a, b);
    }
    return total;
}

// ---------------------------------------------------------------------------
// steering feasibility

enum class SteerReason {
    Ok = 0,
    UnknownVnf,
    SameVnf,
    BackupDestination,
    KindMismatch,
    DestinationCongested,
    ReliabilityViolation,
    CapacityViolation,
    QueuingViolation,
    LatencyViolation,
};

inline const char* steer_reason_name(SteerReason r) {
    switch (r) {
        case SteerReason::Ok: return "ok";
        case SteerReason::UnknownVnf: return "unknown_vnf";
        case SteerReason::SameVnf: return "same_vnf";
        case SteerReason::BackupDestination: return "backup_destination";
        case SteerReason::KindMismatch: return "kind_mismatch";
        case SteerReason::DestinationCongested: return "destination_congested";
        case SteerReason::ReliabilityViolation: return "reliability_violation";
        case SteerReason::CapacityViolation: return "capacity_violation";
        case SteerReason::QueuingViolation: return "queuing_violation";
        case SteerReason::LatencyViolation: return "latency_violation";
    }
    return "?";
}

struct FeasibilityCheck {
    bool ok = false;
    SteerReason reason = SteerReason::Ok;
};

struct SteeringConfig {
    double mttf_threshold_hours = 0.0;
    // Queuing-headroom gate: the destination, carrying its own traffic plus
    // the re-targeted traffic, must stay below the congestion threshold.
    double rho_threshold = 0.9;
};

/// Decide whether re-targeting src's traffic onto dst keeps every affected
/// chain within its latency bound and respects reliability, capacity, and
/// congestion constraints. Pure in its inputs; never throws.
inline FeasibilityCheck steering_feasible(VnfId src, VnfId dst, const Deployment& dep,
                                          std::span<const std::uint8_t> congested_vnf,
                                          const SteeringConfig& cfg) {
    const int v = dep.n_vnfs();
    if (src < 0 || src >= v || dst < 0 || dst >= v)
        return {false, SteerReason::UnknownVnf};
    if (src == dst) return {false, SteerReason::SameVnf};
    const Vnf& s = dep.vnfs[static_cast<std::size_t>(src)];
    const Vnf& d = dep.vnfs[static_cast<std::size_t>(dst)];
    if (d.backup) return {false, SteerReason::BackupDestination};
    if (d.kind != s.kind) return {false, SteerReason::KindMismatch};
    if (static_cast<std::size_t>(dst) < congested_vnf.size() && congested_vnf[dst])
        return {false, SteerReason::DestinationCongested};

    const ServerId dst_host = dep.placement.host(dst);
    if (dep.graph.mttf_hours[static_cast<std::size_t>(dst_host)] < cfg.mttf_threshold_hours)
        return {false, SteerReason::ReliabilityViolation};

    // Absorbing src's traffic raises dst's CPU use toward its footprint;
    // the host must have that much headroom left.
    double extra_util = dep.traffic_of(src) / d.service_rate_ppm;
    if (extra_util > 1.0) extra_util = 1.0;
    const double added_load = d.cpu_demand * extra_util;
    const auto loads = dep.server_cpu_loads();
    if (loads[static_cast<std::size_t>(dst_host)] + added_load >
        dep.graph.cpu_capacity[static_cast<std::size_t>(dst_host)])
        return {false, SteerReason::CapacityViolation};

    // dst must be able to process its own traffic plus src's without itself
    // crossing into congestion.
    if (dep.traffic_of(src) + dep.traffic_of(dst) >
        cfg.rho_threshold * d.service_rate_ppm)
        return {false, SteerReason::QueuingViolation};

    for (const ServiceChain& chain : dep.chains) {
        if (!chain.contains(src)) continue;
        ServiceChain substituted = chain;
        for (auto& m : substituted.members)
            if (m == src) m = dst;
        if (!(chain_latency(substituted, dep.placement, dep.graph) <= chain.latency_bound_ms))
            return {false, SteerReason::LatencyViolation};
    }
    return {true, SteerReason::Ok};
}

/// Re-target src's chain slots to dst. Re-validates feasibility; when the
/// move is infeasible nothing changes and the failed check is returned.
inline FeasibilityCheck apply_steering(VnfId src, VnfId dst, Deployment& dep,
                                       std::span<const std::uint8_t> congested_vnf,
                                       const SteeringConfig& cfg) {
    FeasibilityCheck check = steering_feasible(src, dst, dep, congested_vnf, cfg);
    if (!check.ok) return check;
    for (ServiceChain& chain : dep.chains)
        for (auto& m : chain.members)
            if (m == src) m = dst;
    return check;
}

// ---------------------------------------------------------------------------
// greedy placement

/// Greedy sequential placement: near-RT RICs first (each primary followed by
/// its backup), then O-CUs, then O-DUs. Each step picks the highest-MTTF
/// server among those that are capacity-feasible, reachable from the
/// already-placed upstream VNF's host, and within the per-hop latency
/// budget. The order VNFs are drawn within a tier comes from `seed`.
inline Placement greedy_place(const PlacementRequest& req, const ServerGraph& graph,
                              std::uint64_t seed) {
    int max_id = -1;
    for (const Vnf& v : req.primaries) max_id = std::max(max_id, v.id);
    for (const Vnf& v : req.backups) max_id = std::max(max_id, v.id);
    if (max_id < 0) throw Error(ErrorCategory::PlacementInfeasible, "nothing to place");

    Placement placement;
    placement.host_of.assign(static_cast<std::size_t>(max_id) + 1, -1);

    std::vector<double> remaining = graph.cpu_capacity;
    Rng rng(mix_seed(seed, 0x706c6163u)); // placement stream

    // Highest-MTTF server satisfying capacity, reachability, and budget.
    auto pick = [&](const Vnf& v, ServerId upstream_host, ServerId avoid) -> ServerId {
        ServerId best = -1;
        for (ServerId s = 0; s < graph.n_servers; ++s) {
            if (s == avoid) continue;
            if (remaining[static_cast<std::size_t>(s)] < v.cpu_demand) continue;
            if (upstream_host >= 0 && s != upstream_host) {
                if (!graph.connected(upstream_host, s)) continue;
                if (graph.latency(upstream_host, s) > req.hop_latency_budget_ms) continue;
            }
            if (best < 0 || graph.mttf_hours[static_cast<std::size_t>(s)] >
                                graph.mttf_hours[static_cast<std::size_t>(best)])
                best = s;
        }
        return best;
    };

    auto place = [&](const Vnf& v, ServerId upstream_host, ServerId avoid) -> ServerId {
        ServerId s = pick(v, upstream_host, avoid);
        if (s < 0)
            throw Error(ErrorCategory::PlacementInfeasible,
                        "no feasible server for VNF " + std::to_string(v.id) + " (" +
                            vnf_kind_name(v.kind) + (v.backup ? ", backup" : "") + ")");
        placement.host_of[static_cast<std::size_t>(v.id)] = s;
        remaining[static_cast<std::size_t>(s)] -= v.cpu_demand;
        return s;
    };

    auto of_kind = [](const std::vector<Vnf>& pool, VnfKind k) {
        std::vector<Vnf> out;
        for (const Vnf& v : pool)
            if (v.kind == k) out.push_back(v);
        return out;
    };

    // Upstream hosts recorded per tier; the k-th VNF of the next tier chains
    // onto the k-th host of this tier (wrapping when counts differ).
    std::vector<ServerId> nrt_hosts, ocu_hosts;

    for (VnfKind kind : {VnfKind::NearRtRic, VnfKind::OCU, VnfKind::ODU}) {
        std::vector<Vnf> prim = of_kind(req.primaries, kind);
        std::vector<Vnf> back = of_kind(req.backups, kind);
        rng.shuffle(prim);
        rng.shuffle(back);

        const std::vector<ServerId>* upstream =
            kind == VnfKind::NearRtRic ? nullptr : (kind == VnfKind::OCU ? &nrt_hosts : &ocu_hosts);
        auto upstream_for = [&](std::size_t k) -> ServerId {
            if (!upstream || upstream->empty()) return -1;
            return (*upstream)[k % upstream->size()];
        };
        // Chain-derived hint wins over order pairing when available.
        auto upstream_host_of = [&](const Vnf& v, std::size_t k) -> ServerId {
            if (v.id < static_cast<int>(req.upstream_of.size())) {
                VnfId up = req.upstream_of[static_cast<std::size_t>(v.id)];
                if (up >= 0 && up < static_cast<int>(placement.host_of.size()) &&
                    placement.host_of[static_cast<std::size_t>(up)] >= 0)
                    return placement.host_of[static_cast<std::size_t>(up)];
            }
            return upstream_for(k);
        };

        std::vector<ServerId> tier_hosts;
        for (std::size_t k = 0; k < prim.size(); ++k) {
            ServerId host = place(prim[k], upstream_host_of(prim[k], k), -1);
            tier_hosts.push_back(host);
            if (kind == VnfKind::NearRtRic && k < back.size())
                place(back[k], -1, host); // backup immediately after its primary
        }
        if (kind == VnfKind::NearRtRic) {
            for (std::size_t k = prim.size(); k < back.size(); ++k) place(back[k], -1, -1);
        } else {
            for (std::size_t k = 0; k < back.size(); ++k) {
                ServerId avoid = k < tier_hosts.size() ? tier_hosts[k] : -1;
                place(back[k], upstream_for(k), avoid);
            }
        }
        if (kind == VnfKind::NearRtRic)
            nrt_hosts = tier_hosts;
        else if (kind == VnfKind::OCU)
            ocu_hosts = tier_hosts;
    }
    return placement;
}

/// Static capacity invariant: per-server sum of deployment footprints stays
/// within cpu_capacity.
inline bool placement_capacity_ok(const Placement& placement, const std::vector<Vnf>& vnfs,
                                  const ServerGraph& graph, double tol = 1e-9) {
    std::vector<double> used(static_cast<std::size_t>(graph.n_servers), 0.0);
    for (const Vnf& v : vnfs)
        used[static_cast<std::size_t>(placement.host_of[static_cast<std::size_t>(v.id)])] +=
            v.cpu_demand;
    for (int s = 0; s < graph.n_servers; ++s)
        if (used[static_cast<std::size_t>(s)] > graph.cpu_capacity[static_cast<std::size_t>(s)] + tol)
            return false;
    return true;
}

} // namespace orants
