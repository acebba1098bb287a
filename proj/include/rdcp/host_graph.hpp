#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rdcp/rng.hpp"

namespace rdcp {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

enum class HostFamily { complete, complete_bipartite, random_regular, disjoint_union, explicit_edges };

inline const char* family_name(HostFamily f) {
    switch (f) {
        case HostFamily::complete: return "complete";
        case HostFamily::complete_bipartite: return "complete_bipartite";
        case HostFamily::random_regular: return "random_regular";
        case HostFamily::disjoint_union: return "union";
        case HostFamily::explicit_edges: return "explicit";
    }
    return "?";
}

inline std::uint64_t pair_key(Vertex u, Vertex v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

struct DegreeStats {
    std::uint64_t min_degree = 0;
    std::uint64_t max_degree = 0;
    double mean_degree = 0.0;
    double outside_fraction = 0.0;
};

/// Finite simple host graph. Large complete and complete bipartite graphs are
/// implicit: adjacency is answered by formula and edges are never listed.
class HostGraph {
public:
    static constexpr std::size_t default_materialize_threshold = 2000;

    static HostGraph complete(std::size_t n, std::size_t threshold = default_materialize_threshold) {
        if (n < 2) throw std::invalid_argument("complete: n must be >= 2");
        HostGraph g;
        g.family_ = HostFamily::complete;
        g.n_ = n;
        g.r_n_ = static_cast<double>(n - 1);
        if (n > threshold) {
            g.implicit_ = true;
            return g;
        }
        std::vector<Edge> edges;
        edges.reserve(n * (n - 1) / 2);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
        g.materialize(std::move(edges));
        return g;
    }

    /// K_{n,n}: left side 0..n-1, right side n..2n-1.
    static HostGraph complete_bipartite(std::size_t n, std::size_t threshold = default_materialize_threshold) {
        if (n < 2) throw std::invalid_argument("complete_bipartite: n must be >= 2");
        HostGraph g;
        g.family_ = HostFamily::complete_bipartite;
        g.n_ = 2 * n;
        g.half_ = n;
        g.r_n_ = static_cast<double>(n);
        if (2 * n > threshold) {
            g.implicit_ = true;
            return g;
        }
        std::vector<Edge> edges;
        edges.reserve(n * n);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = 0; v < n; ++v) edges.emplace_back(u, static_cast<Vertex>(n + v));
        g.materialize(std::move(edges));
        return g;
    }

    /// Configuration-model pairing; a stub pair that would form a loop or a
    /// repeated edge is redrawn, and the whole pairing restarts when stuck.
    static HostGraph random_regular(std::size_t n, std::size_t r, Rng& rng, int max_restarts = 1000) {
        if (r == 0 || r >= n) throw std::invalid_argument("regular: need 0 < r < n");
        if ((n * r) % 2 != 0) throw std::invalid_argument("regular: n*r must be even (got n=" + std::to_string(n) + ", r=" + std::to_string(r) + ")");
        for (int attempt = 0; attempt < max_restarts; ++attempt) {
            auto edges = try_pairing(n, r, rng);
            if (edges.empty()) continue;
            HostGraph g;
            g.family_ = HostFamily::random_regular;
            g.n_ = n;
            g.r_n_ = static_cast<double>(r);
            g.materialize(std::move(edges));
            return g;
        }
        throw std::runtime_error("regular: pairing failed after " + std::to_string(max_restarts) + " restarts");
    }

    /// r_n of the union is its mean degree.
    static HostGraph disjoint_union(const HostGraph& a, const HostGraph& b) {
        auto ea = a.edge_list();
        auto eb = b.edge_list();
        Vertex shift = static_cast<Vertex>(a.num_vertices());
        for (auto& e : eb) ea.emplace_back(e.first + shift, e.second + shift);
        HostGraph g;
        g.family_ = HostFamily::disjoint_union;
        g.n_ = a.num_vertices() + b.num_vertices();
        g.materialize(std::move(ea));
        g.r_n_ = 2.0 * static_cast<double>(g.edges_.size()) / static_cast<double>(g.n_);
        return g;
    }

    /// r_n defaults to the mean degree.
    static HostGraph from_edges(std::size_t n, std::vector<Edge> edges, double r_n = 0.0) {
        if (n < 1) throw std::invalid_argument("explicit: n must be >= 1");
        std::unordered_set<std::uint64_t> seen;
        for (auto& e : edges) {
            if (e.first >= n || e.second >= n) throw std::invalid_argument("explicit: vertex out of range");
            if (e.first == e.second) throw std::invalid_argument("explicit: self-loop");
            if (!seen.insert(pair_key(e.first, e.second)).second) throw std::invalid_argument("explicit: repeated edge");
        }
        HostGraph g;
        g.family_ = HostFamily::explicit_edges;
        g.n_ = n;
        g.materialize(std::move(edges));
        g.r_n_ = r_n > 0.0 ? r_n : 2.0 * static_cast<double>(g.edges_.size()) / static_cast<double>(n);
        if (!(g.r_n_ > 0.0)) throw std::invalid_argument("explicit: graph has no edges");
        return g;
    }

    HostFamily family() const { return family_; }
    std::size_t num_vertices() const { return n_; }
    double r_n() const { return r_n_; }
    bool is_implicit() const { return implicit_; }

    std::uint64_t num_edges() const {
        if (!implicit_) return edges_.size();
        if (family_ == HostFamily::complete) return static_cast<std::uint64_t>(n_) * (n_ - 1) / 2;
        return static_cast<std::uint64_t>(half_) * half_;
    }

    std::size_t degree(Vertex v) const {
        if (!implicit_) return adjacency_[v].size();
        return family_ == HostFamily::complete ? n_ - 1 : half_;
    }

    bool has_edge(Vertex u, Vertex v) const {
        if (u == v || u >= n_ || v >= n_) return false;
        if (implicit_) {
            if (family_ == HostFamily::complete) return true;
            return (u < half_) != (v < half_);
        }
        const auto& a = adjacency_[u];
        return std::binary_search(a.begin(), a.end(), v);
    }

    /// Sorted neighbor list (computed on the fly for implicit hosts).
    std::vector<Vertex> neighbors(Vertex v) const {
        if (!implicit_) return adjacency_[v];
        std::vector<Vertex> out;
        out.reserve(degree(v));
        for (Vertex u = 0; u < n_; ++u)
            if (has_edge(v, u)) out.push_back(u);
        return out;
    }

    /// Materialized only: edge ids parallel to neighbors(v).
    const std::vector<std::uint32_t>& incident_edges(Vertex v) const {
        require_materialized();
        return incident_[v];
    }

    const std::vector<Edge>& edges() const {
        require_materialized();
        return edges_;
    }

    /// Uniform random host edge (any representation).
    Edge random_edge(Rng& rng) const {
        if (!implicit_) return edges_[uniform_below(rng, edges_.size())];
        if (family_ == HostFamily::complete) {
            Vertex u = static_cast<Vertex>(uniform_below(rng, n_));
            Vertex v = static_cast<Vertex>(uniform_below(rng, n_ - 1));
            if (v >= u) ++v;
            return u < v ? Edge{u, v} : Edge{v, u};
        }
        Vertex u = static_cast<Vertex>(uniform_below(rng, half_));
        Vertex v = static_cast<Vertex>(half_ + uniform_below(rng, half_));
        return {u, v};
    }

    bool is_connected() const {
        if (implicit_) return true;
        std::vector<char> seen(n_, 0);
        std::queue<Vertex> q;
        q.push(0);
        seen[0] = 1;
        std::size_t count = 1;
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            for (Vertex v : adjacency_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++count;
                    q.push(v);
                }
        }
        return count == n_;
    }

    std::vector<Edge> edge_list() const {
        if (!implicit_) return edges_;
        if (num_edges() > 50'000'000ULL) throw std::runtime_error("host too large to list edges");
        std::vector<Edge> out;
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v = u + 1; v < n_; ++v)
                if (has_edge(u, v)) out.emplace_back(u, v);
        return out;
    }

private:
    void require_materialized() const {
        if (implicit_) throw std::logic_error("host graph is implicit; edges are not materialized");
    }

    void materialize(std::vector<Edge> edges) {
        for (auto& e : edges)
            if (e.first > e.second) std::swap(e.first, e.second);
        edges_ = std::move(edges);
        std::vector<std::vector<std::pair<Vertex, std::uint32_t>>> tmp(n_);
        for (std::uint32_t i = 0; i < edges_.size(); ++i) {
            tmp[edges_[i].first].emplace_back(edges_[i].second, i);
            tmp[edges_[i].second].emplace_back(edges_[i].first, i);
        }
        adjacency_.assign(n_, {});
        incident_.assign(n_, {});
        for (std::size_t v = 0; v < n_; ++v) {
            std::sort(tmp[v].begin(), tmp[v].end());
            adjacency_[v].reserve(tmp[v].size());
            incident_[v].reserve(tmp[v].size());
            for (auto [w, id] : tmp[v]) {
                adjacency_[v].push_back(w);
                incident_[v].push_back(id);
            }
        }
    }

    static void remove_two(std::vector<Vertex>& stubs, std::size_t i, std::size_t j) {
        if (i < j) std::swap(i, j);
        stubs[i] = stubs.back();
        stubs.pop_back();
        stubs[j] = stubs.back();
        stubs.pop_back();
    }

    static std::vector<Edge> try_pairing(std::size_t n, std::size_t r, Rng& rng) {
        std::vector<Vertex> stubs;
        stubs.reserve(n * r);
        for (Vertex v = 0; v < n; ++v)
            for (std::size_t j = 0; j < r; ++j) stubs.push_back(v);
        std::unordered_set<std::uint64_t> present;
        std::vector<Edge> edges;
        edges.reserve(n * r / 2);
        auto valid = [&](Vertex a, Vertex b) { return a != b && !present.count(pair_key(a, b)); };
        while (!stubs.empty()) {
            std::size_t m = stubs.size();
            bool placed = false;
            for (int tries = 0; tries < 64 && !placed; ++tries) {
                std::size_t i = uniform_below(rng, m);
                std::size_t j = uniform_below(rng, m - 1);
                if (j >= i) ++j;
                if (!valid(stubs[i], stubs[j])) continue;
                present.insert(pair_key(stubs[i], stubs[j]));
                edges.emplace_back(stubs[i], stubs[j]);
                remove_two(stubs, i, j);
                placed = true;
            }
            if (placed) continue;
            // many rejections: choose among the valid pairs that are left, if any
            std::vector<std::pair<std::size_t, std::size_t>> options;
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    if (valid(stubs[i], stubs[j])) options.emplace_back(i, j);
            if (options.empty()) return {};
            auto [i, j] = options[uniform_below(rng, options.size())];
            present.insert(pair_key(stubs[i], stubs[j]));
            edges.emplace_back(stubs[i], stubs[j]);
            remove_two(stubs, i, j);
        }
        return edges;
    }

    HostFamily family_ = HostFamily::explicit_edges;
    std::size_t n_ = 0;
    std::size_t half_ = 0;
    double r_n_ = 0.0;
    bool implicit_ = false;
    std::vector<Edge> edges_;
    std::vector<std::vector<Vertex>> adjacency_;
    std::vector<std::vector<std::uint32_t>> incident_;
};

inline DegreeStats degree_stats(const HostGraph& g, double b = 0.01) {
    DegreeStats s;
    std::size_t n = g.num_vertices();
    if (g.is_implicit()) {
        s.min_degree = s.max_degree = g.degree(0);
        s.mean_degree = static_cast<double>(g.degree(0));
    } else {
        s.min_degree = ~0ULL;
        double total = 0.0;
        for (Vertex v = 0; v < n; ++v) {
            std::uint64_t d = g.degree(v);
            s.min_degree = std::min(s.min_degree, d);
            s.max_degree = std::max(s.max_degree, d);
            total += static_cast<double>(d);
        }
        s.mean_degree = total / static_cast<double>(n);
    }
    std::size_t outside = 0;
    double lo = (1.0 - b) * g.r_n(), hi = (1.0 + b) * g.r_n();
    if (g.is_implicit()) {
        double d = static_cast<double>(g.degree(0));
        outside = (d < lo || d > hi) ? n : 0;
    } else {
        for (Vertex v = 0; v < n; ++v) {
            double d = static_cast<double>(g.degree(v));
            if (d < lo || d > hi) ++outside;
        }
    }
    s.outside_fraction = static_cast<double>(outside) / static_cast<double>(n);
    return s;
}

namespace detail {

inline std::size_t parse_count(const std::string& tok, const std::string& spec, int field) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(tok, &used);
        if (used != tok.size() || v < 0) throw std::invalid_argument("");
        return static_cast<std::size_t>(v);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("host spec '" + spec + "' field " + std::to_string(field) + ": '" + tok + "' is not a non-negative integer");
    }
}

inline HostGraph parse_host_tokens(const std::vector<std::string>& tok, std::size_t& pos, const std::string& spec, Rng& rng) {
    auto need = [&](std::size_t k) {
        if (pos + k > tok.size()) throw std::invalid_argument("host spec '" + spec + "': missing field after '" + tok[pos - 1] + "'");
    };
    need(1);
    std::string family = tok[pos++];
    if (family == "complete") {
        need(1);
        std::size_t n = parse_count(tok[pos], spec, static_cast<int>(pos) + 1);
        ++pos;
        return HostGraph::complete(n);
    }
    if (family == "bipartite") {
        need(1);
        std::size_t n = parse_count(tok[pos], spec, static_cast<int>(pos) + 1);
        ++pos;
        return HostGraph::complete_bipartite(n);
    }
    if (family == "regular") {
        need(2);
        std::size_t n = parse_count(tok[pos], spec, static_cast<int>(pos) + 1);
        std::size_t r = parse_count(tok[pos + 1], spec, static_cast<int>(pos) + 2);
        pos += 2;
        return HostGraph::random_regular(n, r, rng);
    }
    if (family == "union") {
        HostGraph a = parse_host_tokens(tok, pos, spec, rng);
        HostGraph b = parse_host_tokens(tok, pos, spec, rng);
        return HostGraph::disjoint_union(a, b);
    }
    throw std::invalid_argument("host spec '" + spec + "' field " + std::to_string(pos) + ": unknown family '" + family + "'");
}

}  // namespace detail

/// Parses complete:n, bipartite:n, regular:n:r, union:<spec>:<spec>.
inline HostGraph parse_host(const std::string& spec, Rng& rng) {
    std::vector<std::string> tok;
    std::stringstream ss(spec);
    std::string t;
    while (std::getline(ss, t, ':')) tok.push_back(t);
    if (tok.empty()) throw std::invalid_argument("host spec is empty");
    std::size_t pos = 0;
    HostGraph g = detail::parse_host_tokens(tok, pos, spec, rng);
    if (pos != tok.size()) throw std::invalid_argument("host spec '" + spec + "': trailing fields");
    return g;
}

}  // namespace rdcp
