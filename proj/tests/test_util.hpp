#pragma once

// Shared helpers for building small random instances in tests.

#include <vector>

#include "orants/rng.hpp"
#include "orants/topology.hpp"

namespace orants::testutil {

/// Random connected-ish server graph with positive latencies and MTTFs.
inline ServerGraph random_graph(Rng& rng, int n, double p = 0.7) {
    ServerGraph g;
    g.n_servers = n;
    g.adjacency.assign(static_cast<std::size_t>(n) * n, 0);
    g.link_latency_ms.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        g.mttf_hours.push_back(rng.uniform(100.0, 5000.0));
        g.cpu_capacity.push_back(rng.uniform(8.0, 20.0));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool ring_edge = j == i + 1 || (i == 0 && j == n - 1);
            if (ring_edge || rng.uniform() < p) {
                double lat = rng.uniform(0.05, 0.5);
                g.adjacency[g.idx(i, j)] = g.adjacency[g.idx(j, i)] = 1;
                g.link_latency_ms[g.idx(i, j)] = g.link_latency_ms[g.idx(j, i)] = lat;
            }
        }
    return g;
}

/// Deployment with `per_kind` VNFs per kind, one chain per column, random
/// hosts and random live traffic (ignoring reachability).
inline Deployment random_deployment(Rng& rng, int n_servers, int per_kind, double latency_bound) {
    Deployment dep;
    dep.graph = random_graph(rng, n_servers);
    for (int kind = 0; kind < 3; ++kind)
        for (int c = 0; c < per_kind; ++c) {
            Vnf v;
            v.id = kind * per_kind + c;
            v.kind = static_cast<VnfKind>(kind);
            v.service_rate_ppm = rng.uniform(500.0, 2000.0);
            v.cpu_demand = rng.uniform(0.5, 2.0);
            dep.vnfs.push_back(v);
        }
    dep.placement.host_of.assign(dep.vnfs.size(), 0);
    dep.vnf_traffic_ppm.assign(dep.vnfs.size(), 0.0);
    for (const Vnf& v : dep.vnfs) {
        dep.placement.host_of[static_cast<std::size_t>(v.id)] = rng.uniform_int(0, n_servers - 1);
        dep.vnf_traffic_ppm[static_cast<std::size_t>(v.id)] = rng.uniform(0.0, 2500.0);
    }
    for (int c = 0; c < per_kind; ++c) {
        ServiceChain chain;
        chain.id = c;
        chain.members = {c, per_kind + c, 2 * per_kind + c};
        chain.latency_bound_ms = latency_bound;
        chain.reliability_bound = 1e-3;
        dep.chains.push_back(chain);
    }
    return dep;
}

} // namespace orants::testutil
