#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rdcp {

/// Connected graph rooted at vertex 0.
struct RootedGraph {
    std::size_t n = 1;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
};

inline const std::string& single_vertex_code() {
    static const std::string code = "()";
    return code;
}

/// AHU code of a rooted tree given as child lists (root 0).
inline std::string tree_code(const std::vector<std::vector<std::uint32_t>>& children) {
    std::size_t n = children.size();
    std::vector<std::uint32_t> order;
    order.reserve(n);
    order.push_back(0);
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto c : children[order[i]]) order.push_back(c);
    std::vector<std::string> code(n);
    std::vector<std::string> parts;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        parts.clear();
        for (auto c : children[*it]) parts.push_back(std::move(code[c]));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (auto& p : parts) s += p;
        s += ')';
        code[*it] = std::move(s);
    }
    return code[0];
}

namespace detail {

using Colors = std::vector<int>;

// 1-dimensional colour refinement; colours renumbered by sorted signature.
inline void refine(const std::vector<std::vector<std::uint32_t>>& adj, Colors& col) {
    std::size_t n = adj.size();
    int classes = *std::max_element(col.begin(), col.end()) + 1;
    while (true) {
        std::vector<std::pair<std::vector<int>, std::uint32_t>> sig(n);
        for (std::uint32_t v = 0; v < n; ++v) {
            auto& s = sig[v].first;
            s.push_back(col[v]);
            std::vector<int> nb;
            for (auto w : adj[v]) nb.push_back(col[w]);
            std::sort(nb.begin(), nb.end());
            s.insert(s.end(), nb.begin(), nb.end());
            sig[v].second = v;
        }
        std::sort(sig.begin(), sig.end());
        int c = -1;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || sig[i].first != sig[i - 1].first) ++c;
            col[sig[i].second] = c;
        }
        if (c + 1 == classes) return;
        classes = c + 1;
    }
}

inline void search(const std::vector<std::vector<std::uint32_t>>& adj, Colors col, std::string& best) {
    refine(adj, col);
    std::size_t n = adj.size();
    std::vector<int> count(n, 0);
    for (int c : col) ++count[c];
    int cell = -1;
    for (std::size_t c = 0; c < n; ++c)
        if (count[c] > 1) {
            cell = static_cast<int>(c);
            break;
        }
    if (cell < 0) {
        std::vector<std::uint32_t> pos(n);
        for (std::uint32_t v = 0; v < n; ++v) pos[col[v]] = v;
        std::string enc;
        enc.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const auto& a = adj[pos[i]];
                enc += std::binary_search(a.begin(), a.end(), pos[j]) ? '1' : '0';
            }
        if (best.empty() || enc < best) best = enc;
        return;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        if (col[v] != cell) continue;
        Colors next(n);
        for (std::uint32_t x = 0; x < n; ++x) next[x] = 2 * col[x] + 1;
        next[v] = 2 * cell;
        search(adj, std::move(next), best);
    }
}

}  // namespace detail

/// Canonical byte string of a rooted connected graph: AHU form for trees,
/// otherwise the minimal adjacency encoding over individualisation-refinement
/// leaves with distance from the root as the initial colouring.
inline std::string canonical_code(const RootedGraph& g) {
    std::size_t n = g.n;
    if (n == 0) throw std::invalid_argument("canonical_code: empty graph");
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (auto [a, b] : g.edges) {
        if (a >= n || b >= n || a == b) throw std::invalid_argument("canonical_code: bad edge");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        if (std::adjacent_find(a.begin(), a.end()) != a.end()) throw std::invalid_argument("canonical_code: repeated edge");
    }
    std::vector<int> dist(n, -1);
    std::vector<std::uint32_t> order{0};
    dist[0] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (auto w : adj[order[i]])
            if (dist[w] < 0) {
                dist[w] = dist[order[i]] + 1;
                order.push_back(w);
            }
    if (order.size() != n) throw std::invalid_argument("canonical_code: graph not connected");

    if (g.edges.size() + 1 == n) {
        std::vector<std::vector<std::uint32_t>> children(n);
        for (std::uint32_t v = 0; v < n; ++v)
            for (auto w : adj[v])
                if (dist[w] == dist[v] + 1) children[v].push_back(w);
        return tree_code(children);
    }
    std::string best;
    detail::search(adj, dist, best);
    return "G" + std::to_string(n) + ":" + best;
}

using Census = std::map<std::string, double>;

inline Census make_census(const std::vector<std::string>& codes) {
    if (codes.empty()) throw std::invalid_argument("census: no samples");
    Census c;
    for (const auto& s : codes) c[s] += 1.0;
    double n = static_cast<double>(codes.size());
    for (auto& [k, v] : c) v /= n;
    return c;
}

inline double tv_distance(const Census& a, const Census& b) {
    double s = 0.0;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            s += ia->second;
            ++ia;
        } else if (ia == a.end() || ib->first < ia->first) {
            s += ib->second;
            ++ib;
        } else {
            s += std::abs(ia->second - ib->second);
            ++ia;
            ++ib;
        }
    }
    return 0.5 * s;
}

inline std::string to_hex(const std::string& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(2 * bytes.size());
    for (unsigned char c : bytes) {
        out += digits[c >> 4];
        out += digits[c & 15];
    }
    return out;
}

}  // namespace rdcp
