#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdcp/canonical.hpp"
#include "rdcp/degree_dist.hpp"
#include "rdcp/host_graph.hpp"
#include "rdcp/limit_sampler.hpp"
#include "rdcp/rng.hpp"
#include "rdcp/union_find.hpp"

namespace rdcp {

struct AddedEdge {
    Vertex u;
    Vertex v;
    double time;
};

struct RdcpState {
    std::vector<int> constraints;
    std::vector<int> degrees;
    std::vector<AddedEdge> edges_added;
    std::vector<double> sat_time;
    std::vector<std::vector<Vertex>> adj;
    UnionFind dsu;
    double clock = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t unsaturated = 0;

    RdcpState() = default;
    explicit RdcpState(std::vector<int> c)
        : constraints(std::move(c)),
          degrees(constraints.size(), 0),
          sat_time(constraints.size(), std::numeric_limits<double>::infinity()),
          adj(constraints.size()),
          dsu(constraints.size()),
          unsaturated(constraints.size()) {}

    std::size_t num_vertices() const { return constraints.size(); }
    bool saturated(Vertex v) const { return degrees[v] >= constraints[v]; }
    bool adjacent(Vertex u, Vertex v) const {
        const auto& a = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
        Vertex w = adj[u].size() <= adj[v].size() ? v : u;
        return std::find(a.begin(), a.end(), w) != a.end();
    }

    void add_edge(Vertex u, Vertex v, double t) {
        if (saturated(u) || saturated(v)) throw std::logic_error("rdcp: edge added at a saturated vertex");
        edges_added.push_back({u, v, t});
        adj[u].push_back(v);
        adj[v].push_back(u);
        ++steps;
        clock = t;
        dsu.unite(u, v);
        for (Vertex x : {u, v}) {
            if (++degrees[x] > constraints[x]) throw std::logic_error("rdcp: degree constraint violated");
            if (degrees[x] == constraints[x]) {
                sat_time[x] = t;
                --unsaturated;
            }
        }
    }
};

struct StopRule {
    enum class Kind { until_time, until_steps, until_final };
    Kind kind = Kind::until_final;
    double time = 0.0;
    std::uint64_t steps = 0;

    static StopRule until_time(double t) {
        if (!(t >= 0.0)) throw std::invalid_argument("stop time must be >= 0");
        return {Kind::until_time, t, 0};
    }
    static StopRule until_steps(long long k) {
        if (k < 0) throw std::invalid_argument("stop step count must be >= 0");
        return {Kind::until_steps, 0.0, static_cast<std::uint64_t>(k)};
    }
    static StopRule until_final() { return {Kind::until_final, 0.0, 0}; }

    std::string describe() const {
        switch (kind) {
            case Kind::until_time: return "time:" + std::to_string(time);
            case Kind::until_steps: return "steps:" + std::to_string(steps);
            case Kind::until_final: return "final";
        }
        return "?";
    }
};

struct SimOptions {
    std::size_t candidate_cap = 20'000'000;  // pairs enumerated once few unsaturated vertices remain
};

inline std::vector<int> assign_constraints(const HostGraph& host, const DegreeDistribution& dist, Rng& rng) {
    std::vector<int> c(host.num_vertices());
    for (auto& x : c) x = dist.sample(rng);
    return c;
}

/// X_e ~ Exp(mean r_n), one per materialized host edge.
inline std::vector<double> draw_activation_times(const HostGraph& host, Rng& rng) {
    const auto& edges = host.edges();
    std::vector<double> x(edges.size());
    double rate = 1.0 / host.r_n();
    for (auto& v : x) v = exponential(rng, rate);
    return x;
}

namespace detail {

inline bool stop_reached(const RdcpState& s, const StopRule& stop) {
    return stop.kind == StopRule::Kind::until_steps && s.steps >= stop.steps;
}

struct Candidate {
    double time;
    std::uint64_t index;
    Vertex u, v;
};

// Processes candidates in time order (ties by index) until the stop rule fires.
inline void run_candidates(RdcpState& s, std::vector<Candidate>& cand, const StopRule& stop) {
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return a.time < b.time || (a.time == b.time && a.index < b.index);
    });
    for (const auto& c : cand) {
        if (stop_reached(s, stop)) return;
        if (stop.kind == StopRule::Kind::until_time && c.time > stop.time) break;
        if (!s.saturated(c.u) && !s.saturated(c.v)) s.add_edge(c.u, c.v, c.time);
    }
    if (stop.kind == StopRule::Kind::until_time) s.clock = stop.time;
}

inline RdcpState simulate_lazy(const HostGraph& host, std::vector<int> constraints, const StopRule& stop, Rng& rng,
                               const SimOptions& opt) {
    RdcpState s(std::move(constraints));
    const std::size_t n = host.num_vertices();
    const bool bip = host.family() == HostFamily::complete_bipartite;
    const std::size_t half = n / 2;
    const double total = static_cast<double>(host.num_edges());
    const double rate = total / host.r_n();
    std::uint64_t unsat_left = bip ? half : n;
    auto count_side = [&](Vertex x) {
        if (bip && x < half && s.saturated(x)) --unsat_left;
        if (!bip && s.saturated(x)) --unsat_left;
    };
    auto candidate_pairs = [&]() -> double {
        double u = static_cast<double>(s.unsaturated);
        if (!bip) return u * (u - 1.0) / 2.0;
        double l = static_cast<double>(unsat_left);
        return l * (u - l);
    };
    double t = 0.0;
    while (!stop_reached(s, stop)) {
        double c = candidate_pairs();
        if (c <= 0.0) {
            if (stop.kind == StopRule::Kind::until_time) s.clock = stop.time;
            return s;
        }
        if (c * 8.0 <= total && c <= static_cast<double>(opt.candidate_cap)) break;
        t += exponential(rng, rate);
        if (stop.kind == StopRule::Kind::until_time && t > stop.time) {
            s.clock = stop.time;
            return s;
        }
        auto [u, v] = host.random_edge(rng);
        if (s.saturated(u) || s.saturated(v) || s.adjacent(u, v)) continue;
        s.add_edge(u, v, t);
        count_side(u);
        count_side(v);
    }
    if (stop_reached(s, stop)) return s;
    // few unsaturated vertices left: list their pairs with fresh residual clocks
    std::vector<Vertex> open;
    for (Vertex v = 0; v < n; ++v)
        if (!s.saturated(v)) open.push_back(v);
    std::vector<Candidate> cand;
    double r = 1.0 / host.r_n();
    std::uint64_t idx = 0;
    for (std::size_t i = 0; i < open.size(); ++i)
        for (std::size_t j = i + 1; j < open.size(); ++j) {
            Vertex u = open[i], v = open[j];
            if (!host.has_edge(u, v) || s.adjacent(u, v)) continue;
            cand.push_back({t + exponential(rng, r), idx++, u, v});
        }
    run_candidates(s, cand, stop);
    return s;
}

}  // namespace detail

/// Runs the process on a materialized host with the given activation times.
inline RdcpState simulate_with_times(const HostGraph& host, std::vector<int> constraints, const std::vector<double>& times,
                                     const StopRule& stop) {
    if (constraints.size() != host.num_vertices()) throw std::invalid_argument("simulate: constraint vector size mismatch");
    const auto& edges = host.edges();
    if (times.size() != edges.size()) throw std::invalid_argument("simulate: activation time count mismatch");
    RdcpState s(std::move(constraints));
    std::vector<detail::Candidate> cand(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) cand[e] = {times[e], e, edges[e].first, edges[e].second};
    detail::run_candidates(s, cand, stop);
    return s;
}

inline RdcpState simulate(const HostGraph& host, std::vector<int> constraints, const StopRule& stop, Rng& rng,
                          const SimOptions& opt = {}) {
    if (constraints.size() != host.num_vertices()) throw std::invalid_argument("simulate: constraint vector size mismatch");
    for (int c : constraints)
        if (c < 2) throw std::invalid_argument("simulate: degree constraints must be >= 2");
    if (host.is_implicit()) return detail::simulate_lazy(host, std::move(constraints), stop, rng, opt);
    auto times = draw_activation_times(host, rng);
    return simulate_with_times(host, std::move(constraints), times, stop);
}

/// Discrete-time oracle: tries uniformly chosen untried host edges and keeps
/// each one whose endpoints are both unsaturated. The clock counts steps.
inline RdcpState simulate_discrete_oracle(const HostGraph& host, std::vector<int> constraints, std::uint64_t k, Rng& rng) {
    RdcpState s(std::move(constraints));
    std::vector<Edge> untried = host.edges();
    while (s.steps < k && !untried.empty()) {
        std::size_t i = uniform_below(rng, untried.size());
        Edge e = untried[i];
        untried[i] = untried.back();
        untried.pop_back();
        if (!s.saturated(e.first) && !s.saturated(e.second)) s.add_edge(e.first, e.second, static_cast<double>(s.steps + 1));
    }
    return s;
}

/// True when every host edge not added has a saturated endpoint.
inline bool is_maximal(const HostGraph& host, const RdcpState& s) {
    for (const auto& [u, v] : host.edges())
        if (!s.saturated(u) && !s.saturated(v) && !s.adjacent(u, v)) return false;
    return true;
}

struct ComponentStats {
    std::uint64_t largest = 0;
    double susceptibility = 0.0;
    std::uint64_t count = 0;
};

inline ComponentStats component_stats(const RdcpState& s) {
    return {s.dsu.largest(), static_cast<double>(s.dsu.sum_of_squares()) / static_cast<double>(s.num_vertices()),
            s.dsu.components()};
}

/// Ball of radius R: vertices within distance R, edges with an endpoint at distance < R.
inline RootedGraph ball(const RdcpState& s, Vertex v, int R) {
    if (R < 0) throw std::invalid_argument("neighborhood: R must be >= 0");
    std::vector<Vertex> verts{v};
    std::vector<int> dist{0};
    auto index_of = [&](Vertex x) -> int {
        for (std::size_t i = 0; i < verts.size(); ++i)
            if (verts[i] == x) return static_cast<int>(i);
        return -1;
    };
    RootedGraph g;
    for (std::size_t q = 0; q < verts.size(); ++q) {
        if (dist[q] >= R) continue;
        for (Vertex y : s.adj[verts[q]]) {
            int iy = index_of(y);
            if (iy < 0) {
                iy = static_cast<int>(verts.size());
                verts.push_back(y);
                dist.push_back(dist[q] + 1);
            }
            // edges between two inner vertices are seen twice; keep one copy
            if (dist[static_cast<std::size_t>(iy)] < R && static_cast<std::size_t>(iy) < q) continue;
            g.edges.emplace_back(static_cast<std::uint32_t>(q), static_cast<std::uint32_t>(iy));
        }
    }
    g.n = verts.size();
    return g;
}

inline std::string neighborhood(const RdcpState& s, Vertex v, int R) { return canonical_code(ball(s, v, R)); }

/// Two-phase exploration of a materialized host around root using activation
/// times: breadth-first over generations 0..R with cutoff t_hat, then largest
/// label first with each vertex's cutoff its own label. Returns nothing on a
/// cycle alarm (an edge with time <= t_hat between a vertex being explored and
/// an already visited vertex other than its parent).
inline std::optional<std::vector<ExploreNode>> explore_host(const HostGraph& host, const std::vector<int>& constraints,
                                                            const std::vector<double>& times, Vertex root, double t_hat,
                                                            int R) {
    const std::size_t n = host.num_vertices();
    std::vector<int> node_of(n, -1);
    std::vector<ExploreNode> nodes;
    nodes.push_back(ExploreNode{-1, 0.0, 0, constraints[root], t_hat, root, {}});
    node_of[root] = 0;
    std::vector<char> explored(1, 0);
    while (true) {
        int pick = -1;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (explored[i]) continue;
            const auto& a = nodes[i];
            if (pick < 0) {
                pick = static_cast<int>(i);
                continue;
            }
            const auto& b = nodes[static_cast<std::size_t>(pick)];
            bool a_bfs = a.gen <= R, b_bfs = b.gen <= R;
            bool better;
            if (a_bfs != b_bfs) better = a_bfs;
            else if (a_bfs) better = a.gen < b.gen || (a.gen == b.gen && a.label < b.label);
            else better = a.label > b.label;
            if (better) pick = static_cast<int>(i);
        }
        if (pick < 0) break;
        std::size_t i = static_cast<std::size_t>(pick);
        explored[i] = 1;
        Vertex x = nodes[i].host_vertex;
        double cutoff = nodes[i].cutoff;
        int gen = nodes[i].gen + 1;
        std::vector<std::pair<double, Vertex>> fresh;
        const auto& nb = host.neighbors(x);
        const auto& ids = host.incident_edges(x);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            Vertex y = nb[k];
            double tx = times[ids[k]];
            int ny = node_of[y];
            if (ny >= 0) {
                if (ny == nodes[i].parent) continue;
                if (tx <= t_hat) return std::nullopt;
                continue;
            }
            if (tx <= cutoff) fresh.emplace_back(tx, y);
        }
        std::sort(fresh.begin(), fresh.end());
        for (auto [tx, y] : fresh) {
            int c = static_cast<int>(nodes.size());
            nodes.push_back(ExploreNode{static_cast<int>(i), tx, gen, constraints[y], gen <= R ? t_hat : tx, y, {}});
            nodes[i].children.push_back(c);
            node_of[y] = c;
            explored.push_back(0);
        }
    }
    // children must follow parents for the leaf recursion; creation order guarantees it
    return nodes;
}

}  // namespace rdcp
