#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdcp/canonical.hpp"
#include "rdcp/degree_dist.hpp"
#include "rdcp/lambda_solution.hpp"
#include "rdcp/rng.hpp"

namespace rdcp {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TreeNode {
    int parent = -1;
    double type = 0.0;   // phantom saturation time (truncated for exploration output)
    int constraint = 2;
    double label = 0.0;  // label of the edge to the parent
    int depth = 0;
    std::vector<int> children;
};

/// Rooted edge-labelled tree; node 0 is the root.
struct SampledTree {
    std::vector<TreeNode> nodes;
    bool truncated = false;      // node cap hit
    bool depth_limited = false;  // nodes at max_depth were not expanded

    std::size_t size() const { return nodes.size(); }

    /// Canonical code of the ball of radius R around the root.
    std::string ball_code(int R) const {
        std::vector<int> keep(nodes.size(), -1);
        std::vector<std::vector<std::uint32_t>> children;
        keep[0] = 0;
        children.emplace_back();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (keep[i] < 0 || nodes[i].depth >= R) continue;
            for (int c : nodes[i].children) {
                keep[c] = static_cast<int>(children.size());
                children.emplace_back();
                children[keep[i]].push_back(static_cast<std::uint32_t>(keep[c]));
            }
        }
        return tree_code(children);
    }
};

/// One step of the recursion for phantom times: eta_j = 1{tau_j < T_j},
/// N = first j with eta_1 + ... + eta_j = D, result tau_N. Empty when the
/// streams run out before N is reached.
inline std::optional<double> rde_chi(const std::vector<double>& arrivals, int D, const std::vector<double>& child_types) {
    if (D < 1) throw std::invalid_argument("rde_chi: D must be >= 1");
    std::size_t m = std::min(arrivals.size(), child_types.size());
    int accepted = 0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j > 0 && !(arrivals[j] > arrivals[j - 1])) throw std::invalid_argument("rde_chi: arrivals must increase");
        if (arrivals[j] < child_types[j] && ++accepted == D) return arrivals[j];
    }
    return std::nullopt;
}

struct SamplerCaps {
    std::size_t max_nodes = 1'000'000;
    int max_depth = std::numeric_limits<int>::max();
};

/// Explicit multi-type branching process; types are phantom saturation times.
class MtbpSampler {
public:
    explicit MtbpSampler(const LambdaSolution& sol) : sol_(sol) {}

    const LambdaSolution& solution() const { return sol_; }

    /// T with density f, by inverting P(T > t) = lambda'(t).
    double sample_root_type(Rng& rng) const { return sol_.survival_inverse(uniform_open0(rng)); }

    /// d ~ p^{t}, p_k^t proportional to lambda(t)^{k-1}/(k-1)! p_k.
    int sample_constraint(double type, Rng& rng) const {
        auto w = sol_.forms().constraint_weights(sol_.lambda(type));
        double u = uniform01(rng), acc = 0.0;
        int last = 2;
        for (int k = 2; k < static_cast<int>(w.size()); ++k) {
            if (w[k] <= 0.0) continue;
            last = k;
            acc += w[k];
            if (u < acc) return k;
        }
        return last;
    }

    std::pair<double, int> sample_root(Rng& rng) const {
        double t0 = sample_root_type(rng);
        return {t0, sample_constraint(t0, rng)};
    }

    /// Type of the root's last child: density f on (t0, inf), renormalised.
    double sample_last_child_type(double t0, Rng& rng) const {
        return sol_.survival_inverse(uniform_open0(rng) * sol_.lambda_prime(t0));
    }

    /// (tau, s) with density f(s)/lambda(t0) on {tau <= t0, tau <= s}: s has
    /// density f(s) min(t0, s)/lambda(t0), then tau is uniform on [0, min(t0, s)].
    std::pair<double, double> sample_pair(double t0, Rng& rng) const {
        double l0 = sol_.lambda(t0);
        double a0 = l0 - t0 * sol_.forms().psi(l0);
        double s;
        if (uniform01(rng) * l0 < a0)
            s = sol_.partial_mean_inverse(uniform_open0(rng) * a0, t0);
        else
            s = sol_.survival_inverse(uniform_open0(rng) * sol_.forms().psi(l0));
        double tau = uniform01(rng) * std::min(t0, s);
        return {tau, s};
    }

    /// Children (tau, type) of a node of type t0 and constraint d, sorted by tau.
    std::vector<std::pair<double, double>> children(double t0, int d, bool is_root, Rng& rng) const {
        std::vector<std::pair<double, double>> out;
        out.reserve(d);
        for (int j = 0; j < d - 1; ++j) out.push_back(sample_pair(t0, rng));
        if (is_root) out.emplace_back(t0, sample_last_child_type(t0, rng));
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Component of the root keeping edges with label < t_hat, generated breadth first.
    SampledTree component(double t_hat, Rng& rng, const SamplerCaps& caps = {}) const {
        SampledTree tree;
        auto [t0, d0] = sample_root(rng);
        tree.nodes.push_back(TreeNode{-1, t0, d0, 0.0, 0, {}});
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            if (tree.nodes[i].depth >= caps.max_depth) {
                tree.depth_limited = true;
                continue;
            }
            if (tree.nodes.size() >= caps.max_nodes) {
                tree.truncated = true;
                break;
            }
            double type = tree.nodes[i].type;
            int d = tree.nodes[i].constraint;
            int depth = tree.nodes[i].depth;
            for (auto [tau, s] : children(type, d, i == 0, rng)) {
                if (!(tau < t_hat)) continue;
                int c = static_cast<int>(tree.nodes.size());
                tree.nodes.push_back(TreeNode{static_cast<int>(i), s, sample_constraint(s, rng), tau, depth + 1, {}});
                tree.nodes[i].children.push_back(c);
            }
        }
        return tree;
    }

private:
    const LambdaSolution& sol_;
};

/// A vertex discovered by the two-phase exploration.
struct ExploreNode {
    int parent = -1;
    double label = 0.0;
    int gen = 0;
    int constraint = 2;
    double cutoff = 0.0;  // children have labels <= cutoff
    std::uint32_t host_vertex = 0;
    std::vector<int> children;  // increasing labels
};

/// Truncated phantom times by recursion from the leaves. A value of +inf means
/// the vertex is not saturated by its own children before its cutoff.
inline std::vector<double> truncated_phantom_times(const std::vector<ExploreNode>& nodes) {
    std::vector<double> S(nodes.size(), kInf);
    std::vector<double> C;
    for (std::size_t k = nodes.size(); k-- > 0;) {
        C.clear();
        for (int c : nodes[k].children)
            if (nodes[c].label < S[c]) C.push_back(nodes[c].label);
        int d = nodes[k].constraint;
        if (static_cast<int>(C.size()) >= d) {
            std::nth_element(C.begin(), C.begin() + (d - 1), C.end());
            S[k] = C[d - 1];
        }
    }
    return S;
}

/// The R-ball of the root: a root edge is kept iff tau <= min(S_root, S_child),
/// a deeper edge iff its upper end is in the ball and tau < min(S_parent, S_child).
inline SampledTree ball_from_exploration(const std::vector<ExploreNode>& nodes, const std::vector<double>& S, int R) {
    SampledTree tree;
    tree.nodes.push_back(TreeNode{-1, S[0], nodes[0].constraint, 0.0, 0, {}});
    std::vector<std::pair<int, int>> queue{{0, 0}};  // (explore index, tree index)
    for (std::size_t q = 0; q < queue.size(); ++q) {
        auto [i, ti] = queue[q];
        if (nodes[i].gen >= R) continue;
        for (int c : nodes[i].children) {
            double bound = std::min(S[i], S[c]);
            bool kept = i == 0 ? nodes[c].label <= bound : nodes[c].label < bound;
            if (!kept) continue;
            int tc = static_cast<int>(tree.nodes.size());
            tree.nodes.push_back(TreeNode{ti, S[c], nodes[c].constraint, nodes[c].label, nodes[c].gen, {}});
            tree.nodes[ti].children.push_back(tc);
            queue.emplace_back(c, tc);
        }
    }
    return tree;
}

/// Two-phase exploration of the Poisson weighted infinite tree: generations
/// 0..R see unit-rate arrivals on [0, t_hat], deeper vertices only arrivals
/// below their own label. Returns the R-ball of the RDCP at time t_hat.
inline SampledTree pwit_explore(const DegreeDistribution& dist, double t_hat, int R, Rng& rng,
                                const SamplerCaps& caps = {}) {
    if (!std::isfinite(t_hat) || t_hat < 0.0) throw std::invalid_argument("pwit_explore: t_hat must be finite and >= 0");
    if (R < 0) throw std::invalid_argument("pwit_explore: R must be >= 0");
    std::vector<ExploreNode> nodes;
    nodes.push_back(ExploreNode{-1, 0.0, 0, dist.sample(rng), t_hat, 0, {}});
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double cutoff = nodes[i].cutoff;
        int gen = nodes[i].gen + 1;
        double t = 0.0;
        while (true) {
            t += exponential(rng, 1.0);
            if (t > cutoff) break;
            if (nodes.size() >= caps.max_nodes) throw std::runtime_error("pwit_explore: node cap exceeded");
            int c = static_cast<int>(nodes.size());
            nodes.push_back(ExploreNode{static_cast<int>(i), t, gen, dist.sample(rng), gen <= R ? t_hat : t, 0, {}});
            nodes[i].children.push_back(c);
        }
    }
    return ball_from_exploration(nodes, truncated_phantom_times(nodes), R);
}

}  // namespace rdcp
