#pragma once

// Scenario files: the on-disk description of one O-RAN instance (servers,
// links, VNF inventory, chains, arrival profiles, simulation parameters).
// Plain line-oriented `key = value` text inside [sections]; the loader
// reports errors with file and line, and save/load round-trips losslessly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orants/csv.hpp"
#include "orants/error.hpp"
#include "orants/rng.hpp"
#include "orants/topology.hpp"
#include "orants/traffic.hpp"

namespace orants {

struct ScenarioParams {
    double rho_threshold = 0.9;
    double mttf_threshold_hours = 0.0;
    double buffer_minutes = 60.0;
    int nbc_lead_minutes = 1;
    std::array<double, 3> proc_latency_ms{0.1, 0.15, 0.2};
    double hop_latency_budget_ms = kInfLatency;
};

struct Scenario {
    int schema_version = 1;
    std::string name;
    ServerGraph graph;
    std::vector<double> link_error_rate; // n x n, alongside graph adjacency
    std::vector<Vnf> vnfs;               // primaries first, then backups
    std::vector<ServiceChain> chains;
    std::vector<TrafficClass> chain_class; // per chain
    std::vector<ArrivalProfile> profiles;  // per chain
    ScenarioParams params;
    std::vector<std::pair<std::string, std::string>> provenance;

    int n_vnfs() const { return static_cast<int>(vnfs.size()); }
    int n_chains() const { return static_cast<int>(chains.size()); }

    TrafficParams traffic_params() const {
        return {params.rho_threshold, params.buffer_minutes, params.proc_latency_ms};
    }

    SteeringConfig steering_config() const {
        return {params.mttf_threshold_hours, params.rho_threshold};
    }

    PlacementRequest placement_request() const {
        PlacementRequest req;
        req.hop_latency_budget_ms = params.hop_latency_budget_ms;
        for (const Vnf& v : vnfs) (v.backup ? req.backups : req.primaries).push_back(v);
        req.upstream_of.assign(vnfs.size(), -1);
        for (const ServiceChain& c : chains) {
            auto& up = req.upstream_of;
            if (up[static_cast<std::size_t>(c.members[1])] < 0)
                up[static_cast<std::size_t>(c.members[1])] = c.members[0];
            if (up[static_cast<std::size_t>(c.members[2])] < 0)
                up[static_cast<std::size_t>(c.members[2])] = c.members[1];
        }
        return req;
    }

    void validate() const;
};

// ---------------------------------------------------------------------------
// validation

inline void Scenario::validate() const {
    graph.validate();
    const std::size_t n2 = static_cast<std::size_t>(graph.n_servers) * graph.n_servers;
    if (link_error_rate.size() != n2)
        throw Error(ErrorCategory::Scenario, "link error-rate matrix size mismatch");

    const int v = n_vnfs();
    std::vector<int> seen(static_cast<std::size_t>(v), 0);
    for (const Vnf& f : vnfs) {
        if (f.id < 0 || f.id >= v)
            throw Error(ErrorCategory::Scenario, "VNF ids must be dense 0..V-1");
        if (seen[static_cast<std::size_t>(f.id)]++)
            throw Error(ErrorCategory::Scenario, "duplicate VNF id " + std::to_string(f.id));
        if (!(f.service_rate_ppm > 0.0))
            throw Error(ErrorCategory::Scenario,
                        "service_rate_ppm must be positive (VNF " + std::to_string(f.id) + ")");
        if (!(f.cpu_demand > 0.0))
            throw Error(ErrorCategory::Scenario,
                        "cpu_demand must be positive (VNF " + std::to_string(f.id) + ")");
    }

    const int k = n_chains();
    if (chain_class.size() != static_cast<std::size_t>(k) ||
        profiles.size() != static_cast<std::size_t>(k))
        throw Error(ErrorCategory::Scenario, "chains, classes, and profiles must align");
    for (int c = 0; c < k; ++c) {
        const ServiceChain& chain = chains[static_cast<std::size_t>(c)];
        if (chain.id != c)
            throw Error(ErrorCategory::Scenario, "chain ids must be dense 0..K-1");
        static constexpr VnfKind slot_kind[3] = {VnfKind::NearRtRic, VnfKind::OCU, VnfKind::ODU};
        for (int slot = 0; slot < 3; ++slot) {
            VnfId m = chain.members[static_cast<std::size_t>(slot)];
            if (m < 0 || m >= v)
                throw Error(ErrorCategory::Scenario,
                            "chain " + std::to_string(c) + " references unknown VNF");
            const Vnf& f = vnfs[static_cast<std::size_t>(m)];
            if (f.kind != slot_kind[slot])
                throw Error(ErrorCategory::Scenario,
                            "chain " + std::to_string(c) + " slot " + std::to_string(slot) +
                                " has wrong VNF kind");
            if (f.backup)
                throw Error(ErrorCategory::Scenario,
                            "chain " + std::to_string(c) + " references a backup VNF");
        }
        if (!(chain.latency_bound_ms > 0.0))
            throw Error(ErrorCategory::Scenario,
                        "chain " + std::to_string(c) + " latency bound must be positive");
        if (!(chain.reliability_bound > 0.0 && chain.reliability_bound < 1.0))
            throw Error(ErrorCategory::Scenario,
                        "chain " + std::to_string(c) + " reliability bound must be in (0,1)");
        chain_class[static_cast<std::size_t>(c)].validate();
    }

    for (int c = 0; c < k; ++c) {
        const ArrivalProfile& p = profiles[static_cast<std::size_t>(c)];
        if (p.base_rate_ppm < 0.0)
            throw Error(ErrorCategory::Scenario, "base rate must be non-negative");
        for (const GaussianPeak& peak : p.peaks)
            if (!(peak.width_minutes > 0.0))
                throw Error(ErrorCategory::Scenario, "peak width must be positive");
        for (const SpikeEvent& s : p.spikes)
            if (s.duration_minutes < 0.0 || s.multiplier < 0.0)
                throw Error(ErrorCategory::Scenario, "spike duration/multiplier must be >= 0");
    }

    if (!(params.rho_threshold > 0.0 && params.rho_threshold <= 1.0))
        throw Error(ErrorCategory::Scenario, "rho_threshold must be in (0,1]");
    if (!(params.buffer_minutes > 0.0))
        throw Error(ErrorCategory::Scenario, "buffer_minutes must be positive");
    if (params.nbc_lead_minutes < 0)
        throw Error(ErrorCategory::Scenario, "nbc_lead_minutes must be >= 0");

    // Link error rates against each chain's reliability bound. Placement is
    // not known yet, so the check is worst case over declared links: any two
    // hops must stay within the bound. Reliability during steering is gated
    // by MTTF, not re-derived from link error rates.
    double worst_link_error = 0.0;
    for (int i = 0; i < graph.n_servers; ++i)
        for (int j = i + 1; j < graph.n_servers; ++j)
            if (graph.connected(i, j))
                worst_link_error = std::max(worst_link_error, link_error_rate[graph.idx(i, j)]);
    for (int c = 0; c < k; ++c)
        if (2.0 * worst_link_error > chains[static_cast<std::size_t>(c)].reliability_bound)
            throw Error(ErrorCategory::Scenario,
                        "chain " + std::to_string(c) +
                            " reliability bound is below the worst-case two-hop link error rate");
}

// ---------------------------------------------------------------------------
// parsing

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

struct LineError {
    std::string path;
    int line = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorCategory::Scenario,
                    path + ":" + std::to_string(line) + ": " + msg);
    }

    double num(const std::string& tok) const {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') fail("expected a number, got '" + tok + "'");
        return v;
    }

    int integer(const std::string& tok) const {
        double v = num(tok);
        if (v != std::floor(v)) fail("expected an integer, got '" + tok + "'");
        return static_cast<int>(v);
    }

    std::uint64_t u64(const std::string& tok) const {
        char* end = nullptr;
        unsigned long long v = std::strtoull(tok.c_str(), &end, 10);
        if (end == tok.c_str() || *end != '\0') fail("expected an unsigned integer");
        return v;
    }
};

inline VnfKind parse_kind(const std::string& s, const LineError& at) {
    if (s == "nearrt_ric") return VnfKind::NearRtRic;
    if (s == "ocu") return VnfKind::OCU;
    if (s == "odu") return VnfKind::ODU;
    at.fail("unknown VNF kind '" + s + "'");
}

inline TrafficClassKind parse_class(const std::string& s, const LineError& at) {
    if (s == "ar_vr") return TrafficClassKind::ArVr;
    if (s == "autonomous_vehicle") return TrafficClassKind::AutonomousVehicle;
    if (s == "automated_industry") return TrafficClassKind::AutomatedIndustry;
    at.fail("unknown traffic class '" + s + "'");
}

} // namespace detail

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Scenario, "cannot open scenario: " + path);

    Scenario sc;
    sc.params.hop_latency_budget_ms = kInfLatency;
    std::string section;
    std::string line;
    int lineno = 0;
    int declared_servers = -1, declared_vnfs = -1, declared_chains = -1;
    std::vector<std::tuple<int, int, double, double>> links; // i, j, latency, error

    while (std::getline(in, line)) {
        ++lineno;
        detail::LineError at{path, lineno};
        std::string s = detail::trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']') at.fail("unterminated section header");
            section = s.substr(1, s.size() - 2);
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos) at.fail("expected 'key = value'");
        std::string key = detail::trim(s.substr(0, eq));
        std::string value = detail::trim(s.substr(eq + 1));
        std::vector<std::string> f = detail::split_ws(value);
        auto want = [&](std::size_t lo, std::size_t hi) {
            if (f.size() < lo || f.size() > hi)
                at.fail("wrong field count for '" + key + "'");
        };

        if (section.empty()) {
            if (key == "schema_version") {
                sc.schema_version = at.integer(value);
                if (sc.schema_version != 1) at.fail("unsupported schema_version");
            } else if (key == "name") {
                sc.name = value;
            } else {
                at.fail("unknown top-level key '" + key + "'");
            }
        } else if (section == "params") {
            if (key == "rho_threshold") sc.params.rho_threshold = at.num(value);
            else if (key == "mttf_threshold_hours") sc.params.mttf_threshold_hours = at.num(value);
            else if (key == "buffer_minutes") sc.params.buffer_minutes = at.num(value);
            else if (key == "nbc_lead_minutes") sc.params.nbc_lead_minutes = at.integer(value);
            else if (key == "hop_latency_budget_ms") {
                sc.params.hop_latency_budget_ms = value == "inf" ? kInfLatency : at.num(value);
            } else if (key == "proc_latency_ms") {
                want(3, 3);
                for (int i = 0; i < 3; ++i)
                    sc.params.proc_latency_ms[static_cast<std::size_t>(i)] = at.num(f[static_cast<std::size_t>(i)]);
            } else at.fail("unknown params key '" + key + "'");
        } else if (section == "provenance") {
            sc.provenance.emplace_back(key, value);
        } else if (section == "servers") {
            if (key == "count") {
                declared_servers = at.integer(value);
                if (declared_servers <= 0) at.fail("server count must be positive");
                sc.graph.n_servers = declared_servers;
                sc.graph.mttf_hours.assign(static_cast<std::size_t>(declared_servers), 0.0);
                sc.graph.cpu_capacity.assign(static_cast<std::size_t>(declared_servers), 0.0);
            } else if (key == "server") {
                want(3, 3);
                if (declared_servers < 0) at.fail("server line before count");
                int id = at.integer(f[0]);
                if (id < 0 || id >= declared_servers) at.fail("server id out of range");
                sc.graph.mttf_hours[static_cast<std::size_t>(id)] = at.num(f[1]);
                sc.graph.cpu_capacity[static_cast<std::size_t>(id)] = at.num(f[2]);
                if (!(sc.graph.mttf_hours[static_cast<std::size_t>(id)] > 0.0))
                    at.fail("mttf_hours must be positive");
                if (!(sc.graph.cpu_capacity[static_cast<std::size_t>(id)] > 0.0))
                    at.fail("cpu_capacity must be positive");
            } else at.fail("unknown servers key '" + key + "'");
        } else if (section == "links") {
            if (key != "link") at.fail("unknown links key '" + key + "'");
            want(3, 4);
            if (declared_servers < 0) at.fail("links before [servers] count");
            int i = at.integer(f[0]), j = at.integer(f[1]);
            double lat = at.num(f[2]);
            double err = f.size() == 4 ? at.num(f[3]) : 1e-9;
            if (i < 0 || i >= declared_servers || j < 0 || j >= declared_servers)
                at.fail("link endpoint out of range");
            if (i == j) at.fail("self-links are not allowed");
            if (!(lat > 0.0)) at.fail("link latency must be positive");
            if (err < 0.0 || err >= 1.0) at.fail("link error rate must be in [0,1)");
            links.emplace_back(i, j, lat, err);
        } else if (section == "vnfs") {
            if (key == "count") {
                declared_vnfs = at.integer(value);
            } else if (key == "vnf") {
                want(4, 5);
                Vnf v;
                v.id = at.integer(f[0]);
                v.kind = detail::parse_kind(f[1], at);
                v.service_rate_ppm = at.num(f[2]);
                v.cpu_demand = at.num(f[3]);
                if (f.size() == 5) {
                    if (f[4] != "backup") at.fail("trailing token must be 'backup'");
                    v.backup = true;
                }
                sc.vnfs.push_back(v);
            } else at.fail("unknown vnfs key '" + key + "'");
        } else if (section == "chains") {
            if (key == "count") {
                declared_chains = at.integer(value);
            } else if (key == "chain") {
                want(8, 8);
                ServiceChain c;
                c.id = at.integer(f[0]);
                c.members = {at.integer(f[1]), at.integer(f[2]), at.integer(f[3])};
                c.latency_bound_ms = at.num(f[4]);
                TrafficClass tc;
                tc.name = detail::parse_class(f[5], at);
                tc.max_latency_ms = c.latency_bound_ms;
                tc.error_rate_lower = at.num(f[6]);
                tc.error_rate_upper = at.num(f[7]);
                c.reliability_bound = tc.error_rate_upper;
                sc.chains.push_back(c);
                sc.chain_class.push_back(tc);
            } else at.fail("unknown chains key '" + key + "'");
        } else if (section == "profiles") {
            auto chain_ref = [&](const std::string& tok) {
                int c = at.integer(tok);
                if (c < 0 || static_cast<std::size_t>(c) >= sc.profiles.size())
                    at.fail("profile chain id out of range (declare 'profile' lines in order)");
                return static_cast<std::size_t>(c);
            };
            if (key == "profile") {
                want(3, 3);
                int c = at.integer(f[0]);
                if (c != static_cast<int>(sc.profiles.size()))
                    at.fail("profile lines must appear in chain order");
                ArrivalProfile p;
                p.base_rate_ppm = at.num(f[1]);
                p.noise_seed = at.u64(f[2]);
                sc.profiles.push_back(p);
            } else if (key == "peak") {
                want(4, 4);
                sc.profiles[chain_ref(f[0])].peaks.push_back(
                    {at.num(f[1]), at.num(f[2]), at.num(f[3])});
            } else if (key == "spike") {
                want(4, 4);
                sc.profiles[chain_ref(f[0])].spikes.push_back(
                    {at.num(f[1]), at.num(f[2]), at.num(f[3])});
            } else at.fail("unknown profiles key '" + key + "'");
        } else {
            at.fail("unknown section [" + section + "]");
        }
    }

    detail::LineError eof{path, lineno};
    if (declared_servers < 0) eof.fail("missing [servers] section");
    if (declared_vnfs >= 0 && declared_vnfs != sc.n_vnfs())
        eof.fail("vnf count mismatch: declared " + std::to_string(declared_vnfs) + ", found " +
                 std::to_string(sc.n_vnfs()));
    if (declared_chains >= 0 && declared_chains != sc.n_chains())
        eof.fail("chain count mismatch");

    const std::size_t n2 = static_cast<std::size_t>(declared_servers) * declared_servers;
    sc.graph.adjacency.assign(n2, 0);
    sc.graph.link_latency_ms.assign(n2, 0.0);
    sc.link_error_rate.assign(n2, 0.0);
    for (auto& [i, j, lat, err] : links) {
        sc.graph.adjacency[sc.graph.idx(i, j)] = sc.graph.adjacency[sc.graph.idx(j, i)] = 1;
        sc.graph.link_latency_ms[sc.graph.idx(i, j)] = sc.graph.link_latency_ms[sc.graph.idx(j, i)] = lat;
        sc.link_error_rate[sc.graph.idx(i, j)] = sc.link_error_rate[sc.graph.idx(j, i)] = err;
    }

    // VNF list must arrive in id order for canonical round-tripping.
    std::sort(sc.vnfs.begin(), sc.vnfs.end(), [](const Vnf& a, const Vnf& b) { return a.id < b.id; });

    sc.validate();
    return sc;
}

inline void save_scenario(const Scenario& sc, const std::string& path) {
    std::ostringstream out;
    out << "# orants scenario\n";
    out << "schema_version = " << sc.schema_version << "\n";
    out << "name = " << sc.name << "\n\n";

    out << "[params]\n";
    out << "rho_threshold = " << fmt_double(sc.params.rho_threshold) << "\n";
    out << "mttf_threshold_hours = " << fmt_double(sc.params.mttf_threshold_hours) << "\n";
    out << "buffer_minutes = " << fmt_double(sc.params.buffer_minutes) << "\n";
    out << "nbc_lead_minutes = " << sc.params.nbc_lead_minutes << "\n";
    out << "proc_latency_ms = " << fmt_double(sc.params.proc_latency_ms[0]) << " "
        << fmt_double(sc.params.proc_latency_ms[1]) << " "
        << fmt_double(sc.params.proc_latency_ms[2]) << "\n";
    out << "hop_latency_budget_ms = "
        << (std::isinf(sc.params.hop_latency_budget_ms)
                ? std::string("inf")
                : fmt_double(sc.params.hop_latency_budget_ms))
        << "\n\n";

    if (!sc.provenance.empty()) {
        out << "[provenance]\n";
        for (const auto& [k, v] : sc.provenance) out << k << " = " << v << "\n";
        out << "\n";
    }

    out << "[servers]\n";
    out << "count = " << sc.graph.n_servers << "\n";
    for (int s = 0; s < sc.graph.n_servers; ++s)
        out << "server = " << s << " " << fmt_double(sc.graph.mttf_hours[static_cast<std::size_t>(s)])
            << " " << fmt_double(sc.graph.cpu_capacity[static_cast<std::size_t>(s)]) << "\n";
    out << "\n[links]\n";
    for (int i = 0; i < sc.graph.n_servers; ++i)
        for (int j = i + 1; j < sc.graph.n_servers; ++j)
            if (sc.graph.connected(i, j))
                out << "link = " << i << " " << j << " "
                    << fmt_double(sc.graph.link_latency_ms[sc.graph.idx(i, j)]) << " "
                    << fmt_double(sc.link_error_rate[sc.graph.idx(i, j)]) << "\n";

    out << "\n[vnfs]\n";
    out << "count = " << sc.n_vnfs() << "\n";
    for (const Vnf& v : sc.vnfs) {
        out << "vnf = " << v.id << " " << vnf_kind_name(v.kind) << " "
            << fmt_double(v.service_rate_ppm) << " " << fmt_double(v.cpu_demand);
        if (v.backup) out << " backup";
        out << "\n";
    }

    out << "\n[chains]\n";
    out << "count = " << sc.n_chains() << "\n";
    for (int c = 0; c < sc.n_chains(); ++c) {
        const ServiceChain& chain = sc.chains[static_cast<std::size_t>(c)];
        const TrafficClass& tc = sc.chain_class[static_cast<std::size_t>(c)];
        out << "chain = " << chain.id << " " << chain.members[0] << " " << chain.members[1] << " "
            << chain.members[2] << " " << fmt_double(chain.latency_bound_ms) << " "
            << traffic_class_name(tc.name) << " " << fmt_double(tc.error_rate_lower) << " "
            << fmt_double(tc.error_rate_upper) << "\n";
    }

    out << "\n[profiles]\n";
    for (int c = 0; c < sc.n_chains(); ++c) {
        const ArrivalProfile& p = sc.profiles[static_cast<std::size_t>(c)];
        out << "profile = " << c << " " << fmt_double(p.base_rate_ppm) << " " << p.noise_seed << "\n";
        for (const GaussianPeak& peak : p.peaks)
            out << "peak = " << c << " " << fmt_double(peak.center_minute) << " "
                << fmt_double(peak.width_minutes) << " " << fmt_double(peak.amplitude_ppm) << "\n";
        for (const SpikeEvent& s : p.spikes)
            out << "spike = " << c << " " << fmt_double(s.start_minute) << " "
                << fmt_double(s.duration_minutes) << " " << fmt_double(s.multiplier) << "\n";
    }

    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCategory::Scenario, "cannot write scenario: " + path);
    file << out.str();
}

// ---------------------------------------------------------------------------
// deployment assembly

inline Deployment make_deployment(const Scenario& sc, std::uint64_t placement_seed) {
    Deployment dep;
    dep.graph = sc.graph;
    dep.vnfs = sc.vnfs;
    dep.chains = sc.chains;
    dep.placement = greedy_place(sc.placement_request(), sc.graph, placement_seed);
    dep.vnf_traffic_ppm.assign(dep.vnfs.size(), 0.0);
    return dep;
}

// ---------------------------------------------------------------------------
// generation

struct GenConfig {
    std::string name = "paper-scale";
    int servers = 50;
    int per_kind = 7; // VNFs per kind; total V = 3 * per_kind (+ backups)
    int light_chains = 2; // low-load chains whose VNFs are over-provisioned
    int backups_per_kind = 0;
    std::uint64_t seed = 42;
    double adjacency_p = 0.85;
    double link_latency_lo = 0.05, link_latency_hi = 0.3;
    double mttf_lo = 500.0, mttf_hi = 10000.0;
    // Capacities fit a couple of VNFs per server so spare capacity, and with
    // it steering feasibility, varies across hosts.
    double capacity_lo = 4.0, capacity_hi = 5.5;
    double demand_lo = 1.2, demand_hi = 1.8;
    double base_rate_lo = 700.0, base_rate_hi = 900.0;
    double light_base_lo = 250.0, light_base_hi = 350.0;
    // Home VNFs can carry two chains at base load (so steering may pool
    // them off-peak) but any surge overloads such a pool; absorbers are the
    // only safe harbor during rush hours.
    double headroom_lo = 2.3, headroom_hi = 2.5; // busy VNF rate over own base
    double absorber_factor_lo = 7.5, absorber_factor_hi = 8.5;
    // Rush hours hit every busy chain in a narrow window, so steering
    // requests pile up against the one-action-per-minute budget.
    double morning_center = 480.0, evening_center = 1080.0, center_jitter = 8.0;
    double peak_width_lo = 14.0, peak_width_hi = 20.0;
    double peak_amp_lo = 1.6, peak_amp_hi = 1.9; // relative to base
    double spike_start_lo = 620.0, spike_start_hi = 990.0;
    double spike_mult_lo = 2.8, spike_mult_hi = 3.4;
    double spike_dur_lo = 8.0, spike_dur_hi = 15.0;
    int spikes_per_busy_chain = 1;
};

namespace detail {

inline Scenario gen_scenario_once(const GenConfig& g, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0x67656eull));
    Scenario sc;
    sc.name = g.name;

    const int n = g.servers;
    sc.graph.n_servers = n;
    const std::size_t n2 = static_cast<std::size_t>(n) * n;
    sc.graph.adjacency.assign(n2, 0);
    sc.graph.link_latency_ms.assign(n2, 0.0);
    sc.link_error_rate.assign(n2, 0.0);
    for (int i = 0; i < n; ++i) {
        sc.graph.mttf_hours.push_back(rng.uniform(g.mttf_lo, g.mttf_hi));
        sc.graph.cpu_capacity.push_back(rng.uniform(g.capacity_lo, g.capacity_hi));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform() < g.adjacency_p) {
                double lat = rng.uniform(g.link_latency_lo, g.link_latency_hi);
                double err = rng.uniform(1e-9, 1e-7);
                sc.graph.adjacency[sc.graph.idx(i, j)] = sc.graph.adjacency[sc.graph.idx(j, i)] = 1;
                sc.graph.link_latency_ms[sc.graph.idx(i, j)] =
                    sc.graph.link_latency_ms[sc.graph.idx(j, i)] = lat;
                sc.link_error_rate[sc.graph.idx(i, j)] = sc.link_error_rate[sc.graph.idx(j, i)] = err;
            }

    // MTTF steering threshold: 20th percentile, so most servers qualify.
    std::vector<double> mttf_sorted = sc.graph.mttf_hours;
    std::sort(mttf_sorted.begin(), mttf_sorted.end());
    sc.params.mttf_threshold_hours =
        mttf_sorted[static_cast<std::size_t>(0.2 * static_cast<double>(n))];
    sc.params.hop_latency_budget_ms = 0.5;

    const int k = g.per_kind;
    const int busy = k - g.light_chains;

    // Per-chain base rates; light chains idle low and their member VNFs are
    // sized to absorb a surging busy chain.
    std::vector<double> base(static_cast<std::size_t>(k));
    double busy_base_sum = 0.0;
    for (int c = 0; c < k; ++c) {
        bool light = c >= busy;
        base[static_cast<std::size_t>(c)] = light ? rng.uniform(g.light_base_lo, g.light_base_hi)
                                                  : rng.uniform(g.base_rate_lo, g.base_rate_hi);
        if (!light) busy_base_sum += base[static_cast<std::size_t>(c)];
    }
    const double mean_busy_base = busy > 0 ? busy_base_sum / busy : g.base_rate_lo;

    for (int kind = 0; kind < 3; ++kind)
        for (int c = 0; c < k; ++c) {
            Vnf v;
            v.id = kind * k + c;
            v.kind = static_cast<VnfKind>(kind);
            bool light = c >= busy;
            double rate = light
                              ? rng.uniform(g.absorber_factor_lo, g.absorber_factor_hi) * mean_busy_base
                              : rng.uniform(g.headroom_lo, g.headroom_hi) * base[static_cast<std::size_t>(c)];
            v.service_rate_ppm = std::round(rate);
            v.cpu_demand = rng.uniform(g.demand_lo, g.demand_hi);
            sc.vnfs.push_back(v);
        }
    for (int b = 0; b < g.backups_per_kind; ++b)
        for (int kind = 0; kind < 3; ++kind) {
            Vnf v;
            v.id = 3 * k + b * 3 + kind;
            v.kind = static_cast<VnfKind>(kind);
            v.service_rate_ppm = std::round(rng.uniform(g.headroom_lo, g.headroom_hi) * mean_busy_base);
            v.cpu_demand = rng.uniform(g.demand_lo, g.demand_hi);
            v.backup = true;
            sc.vnfs.push_back(v);
        }

    static constexpr TrafficClassKind class_cycle[3] = {TrafficClassKind::ArVr,
                                                        TrafficClassKind::AutonomousVehicle,
                                                        TrafficClassKind::AutomatedIndustry};
    for (int c = 0; c < k; ++c) {
        ServiceChain chain;
        chain.id = c;
        chain.members = {c, k + c, 2 * k + c};
        TrafficClass tc;
        tc.name = class_cycle[c % 3];
        switch (tc.name) {
            case TrafficClassKind::ArVr:
                tc.max_latency_ms = rng.uniform(5.0, 10.0);
                tc.error_rate_lower = 1e-5;
                tc.error_rate_upper = rng.uniform(2e-4, 1e-3);
                break;
            case TrafficClassKind::AutonomousVehicle:
                tc.max_latency_ms = rng.uniform(5.0, 10.0);
                tc.error_rate_lower = 1e-3;
                tc.error_rate_upper = rng.uniform(2e-3, 1e-2);
                break;
            case TrafficClassKind::AutomatedIndustry:
                tc.max_latency_ms = 1.0;
                tc.error_rate_lower = 1e-9;
                tc.error_rate_upper = rng.uniform(2e-6, 1e-5);
                break;
        }
        chain.latency_bound_ms = tc.max_latency_ms;
        chain.reliability_bound = tc.error_rate_upper;
        sc.chains.push_back(chain);
        sc.chain_class.push_back(tc);

        ArrivalProfile p;
        p.base_rate_ppm = std::round(base[static_cast<std::size_t>(c)]);
        p.noise_seed = mix_seed(seed, 0x6e6f6973u + static_cast<std::uint64_t>(c)) | 1ull;
        bool light = c >= busy;
        if (!light) {
            double morning = g.morning_center + rng.uniform(-g.center_jitter, g.center_jitter);
            double evening = g.evening_center + rng.uniform(-g.center_jitter, g.center_jitter);
            for (double center : {morning, evening})
                p.peaks.push_back({center, rng.uniform(g.peak_width_lo, g.peak_width_hi),
                                   std::round(rng.uniform(g.peak_amp_lo, g.peak_amp_hi) *
                                              p.base_rate_ppm)});
            for (int s = 0; s < g.spikes_per_busy_chain; ++s) {
                double start = rng.uniform(g.spike_start_lo, g.spike_start_hi);
                p.spikes.push_back({std::floor(start),
                                    std::floor(rng.uniform(g.spike_dur_lo, g.spike_dur_hi)),
                                    rng.uniform(g.spike_mult_lo, g.spike_mult_hi)});
            }
        }
        sc.profiles.push_back(p);
    }

    sc.provenance.emplace_back("gen_seed", std::to_string(seed));
    sc.provenance.emplace_back("mttf_dist",
                               "uniform " + fmt_double(g.mttf_lo) + " " + fmt_double(g.mttf_hi));
    sc.provenance.emplace_back(
        "capacity_dist", "uniform " + fmt_double(g.capacity_lo) + " " + fmt_double(g.capacity_hi));
    sc.provenance.emplace_back("adjacency_p", fmt_double(g.adjacency_p));
    return sc;
}

} // namespace detail

/// Generate and validate a scenario; retries with derived seeds when a draw
/// fails validation or greedy placement, then reports every diagnostic.
inline Scenario gen_scenario(const GenConfig& g) {
    std::string diagnostics;
    for (int attempt = 0; attempt < 5; ++attempt) {
        std::uint64_t seed = attempt == 0 ? g.seed : mix_seed(g.seed, static_cast<std::uint64_t>(attempt));
        try {
            Scenario sc = detail::gen_scenario_once(g, seed);
            sc.validate();
            // Feasibility probe: a trial placement must exist and leave every
            // declared chain inside its latency bound.
            Placement trial = greedy_place(sc.placement_request(), sc.graph, 0);
            for (const ServiceChain& chain : sc.chains)
                if (!(chain_latency(chain, trial, sc.graph) <= chain.latency_bound_ms))
                    throw Error(ErrorCategory::Scenario,
                                "chain " + std::to_string(chain.id) +
                                    " violates its latency bound under trial placement");
            if (attempt > 0)
                sc.provenance.emplace_back("gen_retries", std::to_string(attempt));
            return sc;
        } catch (const Error& e) {
            diagnostics += std::string(diagnostics.empty() ? "" : "; ") + "attempt " +
                           std::to_string(attempt) + ": " + e.what();
        }
    }
    throw Error(ErrorCategory::Scenario, "scenario generation failed after retries: " + diagnostics);
}

/// Hand-written deterministic toy instance: 4 servers, 3 VNFs, 1 chain,
/// noise-free traffic with fixed congestion windows.
inline Scenario tiny_scenario() {
    Scenario sc;
    sc.name = "tiny";
    sc.graph.n_servers = 4;
    sc.graph.adjacency.assign(16, 0);
    sc.graph.link_latency_ms.assign(16, 0.0);
    sc.link_error_rate.assign(16, 0.0);
    sc.graph.mttf_hours = {1000.0, 2000.0, 3000.0, 4000.0};
    sc.graph.cpu_capacity = {10.0, 10.0, 10.0, 10.0};
    const double lat[4][4] = {{0, 0.1, 0.15, 0.2},
                              {0.1, 0, 0.12, 0.18},
                              {0.15, 0.12, 0, 0.11},
                              {0.2, 0.18, 0.11, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) {
                sc.graph.adjacency[sc.graph.idx(i, j)] = 1;
                sc.graph.link_latency_ms[sc.graph.idx(i, j)] = lat[i][j];
                sc.link_error_rate[sc.graph.idx(i, j)] = 1e-7;
            }
    sc.params.mttf_threshold_hours = 900.0;
    sc.params.hop_latency_budget_ms = 4.0;

    for (int kind = 0; kind < 3; ++kind) {
        Vnf v;
        v.id = kind;
        v.kind = static_cast<VnfKind>(kind);
        v.service_rate_ppm = 800.0;
        v.cpu_demand = 1.0;
        sc.vnfs.push_back(v);
    }
    ServiceChain chain;
    chain.id = 0;
    chain.members = {0, 1, 2};
    chain.latency_bound_ms = 8.0;
    chain.reliability_bound = 5e-4;
    sc.chains.push_back(chain);
    sc.chain_class.push_back({TrafficClassKind::ArVr, 8.0, 1e-4, 5e-4});

    ArrivalProfile p;
    p.base_rate_ppm = 500.0;
    p.noise_seed = 0; // deterministic
    p.spikes = {{300.0, 40.0, 2.2}, {700.0, 40.0, 2.6}, {1100.0, 60.0, 2.0}};
    sc.profiles.push_back(p);

    sc.provenance.emplace_back("preset", "tiny");
    return sc;
}

} // namespace orants
