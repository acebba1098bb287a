#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rdcp/critical.hpp"
#include "rdcp/lambda_solution.hpp"

namespace rdcp {

struct GridPolicy {
    double tail_mass = 1e-8;       // u_max: mass of H beyond it
    double uniform_fraction = 0.5;  // share of nodes on the uniform part
};

/// Nystrom discretization of the branching operator against the measure rho.
struct KernelGrid {
    double t_hat = 0.0;
    std::size_t G = 0;
    std::vector<double> u;       // nodes
    std::vector<double> weight;  // rho(u_i) * Delta_i
    std::vector<double> e_over_l;  // E(u_i)/lambda(u_i)
    std::vector<double> K;       // row-major G x G

    double kernel(std::size_t i, std::size_t j) const { return K[i * G + j]; }
};

inline double kernel_value(double e_over_l_u, double e_over_l_s, double t_hat, double u, double s) {
    return e_over_l_u * e_over_l_s * std::min(t_hat, std::min(u, s));
}

inline double tail_node(const LambdaSolution& sol, double mass) {
    const LambdaForms& forms = sol.forms();
    double hi = 1.0;
    while (1.0 - forms.int_h(hi) > mass) hi *= 2.0;
    double l = bisect([&](double x) { return (1.0 - forms.int_h(x)) - mass; }, 0.0, hi, 0.0, 200);
    return sol.time_of_lambda(l);
}

/// Uniform nodes on (0, U1] with U1 = 2 max(t_hat, 1), then geometric nodes out
/// to u_max. t_hat = infinity drops the truncation factor.
inline KernelGrid build_grid(const LambdaSolution& sol, double t_hat, std::size_t G, const GridPolicy& policy = {}) {
    if (G < 100) throw std::invalid_argument("build_grid: G must be >= 100");
    if (!(t_hat > 0.0)) throw std::invalid_argument("build_grid: t_hat must be > 0");
    KernelGrid g;
    g.t_hat = t_hat;
    g.G = G;
    double U1 = std::isfinite(t_hat) ? 2.0 * std::max(t_hat, 1.0) : 2.0;
    double umax = std::max(tail_node(sol, policy.tail_mass), 2.0 * U1);
    std::size_t G1 = static_cast<std::size_t>(policy.uniform_fraction * static_cast<double>(G));
    std::size_t G2 = G - G1;
    g.u.reserve(G);
    for (std::size_t k = 1; k <= G1; ++k) g.u.push_back(U1 * static_cast<double>(k) / static_cast<double>(G1));
    double ratio = std::log(umax / U1);
    for (std::size_t k = 1; k <= G2; ++k)
        g.u.push_back(U1 * std::exp(ratio * static_cast<double>(k) / static_cast<double>(G2)));

    g.weight.resize(G);
    g.e_over_l.resize(G);
    for (std::size_t i = 0; i < G; ++i) {
        double left = i == 0 ? 0.0 : g.u[i - 1];
        double right = i + 1 < G ? g.u[i + 1] : g.u[i];
        double l = sol.lambda(g.u[i]);
        double E = sol.forms().expected_children(l);
        g.weight[i] = sol.rho(g.u[i]) * 0.5 * (right - left);
        g.e_over_l[i] = E / l;
    }
    g.K.assign(G * G, 0.0);
    for (std::size_t i = 0; i < G; ++i)
        for (std::size_t j = i; j < G; ++j) {
            double k = kernel_value(g.e_over_l[i], g.e_over_l[j], t_hat, g.u[i], g.u[j]);
            g.K[i * G + j] = k;
            g.K[j * G + i] = k;
        }
    for (std::size_t i = 0; i < G; ++i)
        for (std::size_t j = 0; j < G; ++j)
            if (g.K[i * G + j] != g.K[j * G + i] || g.K[i * G + j] < 0.0)
                throw std::logic_error("build_grid: kernel not symmetric and nonnegative");
    return g;
}

struct EigenResult {
    double mu = 0.0;
    std::vector<double> v;  // eigenfunction values at the nodes, max entry 1
    int iters = 0;
    double residual = 0.0;  // ||A x - mu x|| for the unit symmetric-form iterate
};

/// Power iteration on A = sqrt(W) K sqrt(W), seeded with all ones.
inline EigenResult principal_eigenvalue(const KernelGrid& g, double tol = 1e-13, int max_iters = 10000) {
    std::size_t G = g.G;
    std::vector<double> sw(G), x(G, 1.0 / std::sqrt(static_cast<double>(G))), y(G);
    for (std::size_t i = 0; i < G; ++i) sw[i] = std::sqrt(g.weight[i]);
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        std::vector<double> s(G);
        for (std::size_t j = 0; j < G; ++j) s[j] = sw[j] * in[j];
        for (std::size_t i = 0; i < G; ++i) {
            const double* row = &g.K[i * G];
            double acc = 0.0;
            for (std::size_t j = 0; j < G; ++j) acc += row[j] * s[j];
            out[i] = sw[i] * acc;
        }
    };
    EigenResult r;
    double mu = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        apply(x, y);
        double num = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < G; ++i) {
            num += x[i] * y[i];
            norm += y[i] * y[i];
        }
        norm = std::sqrt(norm);
        double mu_new = num;
        for (std::size_t i = 0; i < G; ++i) x[i] = y[i] / norm;
        r.iters = it;
        if (std::abs(mu_new - mu) < tol) {
            mu = mu_new;
            break;
        }
        mu = mu_new;
        if (it == max_iters) throw std::runtime_error("principal_eigenvalue: no convergence");
    }
    apply(x, y);
    double res = 0.0;
    for (std::size_t i = 0; i < G; ++i) res += (y[i] - mu * x[i]) * (y[i] - mu * x[i]);
    r.mu = mu;
    r.residual = std::sqrt(res);
    r.v.resize(G);
    double vmax = 0.0;
    for (std::size_t i = 0; i < G; ++i) {
        r.v[i] = sw[i] > 0.0 ? x[i] / sw[i] : 0.0;
        vmax = std::max(vmax, std::abs(r.v[i]));
    }
    for (double& v : r.v) v /= vmax;
    return r;
}

struct CrosscheckResult {
    double max_rel_dev = 0.0;
    double boundary_residual = 0.0;
    bool w_increasing = true;
    bool w_concave = true;
    std::size_t nodes_checked = 0;
};

/// Compares w = lambda v / E, scaled to w'(0) = 1, against mu w'' = -H w.
inline CrosscheckResult eigenfunction_crosscheck(const KernelGrid& g, const EigenResult& e, const LambdaSolution& sol) {
    if (!std::isfinite(g.t_hat)) throw std::invalid_argument("eigenfunction_crosscheck: t_hat must be finite");
    std::size_t G = g.G;
    // slope at 0 of the Nystrom extension: (1/mu) sum_j (E/lambda)_j v_j W_j
    double slope = 0.0;
    for (std::size_t j = 0; j < G; ++j) slope += g.e_over_l[j] * e.v[j] * g.weight[j];
    slope /= e.mu;
    WSolution w = solve_W(sol, e.mu, g.t_hat);
    CrosscheckResult r;
    double prev = 0.0, prev_inc = std::numeric_limits<double>::infinity();
    double prev_u = 0.0;
    for (std::size_t i = 0; i < G && g.u[i] <= g.t_hat; ++i) {
        double wi = e.v[i] / g.e_over_l[i] / slope;
        double y = w.W(g.u[i]);
        r.max_rel_dev = std::max(r.max_rel_dev, std::abs(wi - y) / std::abs(y));
        double inc = (wi - prev) / (g.u[i] - prev_u);
        if (!(inc > 0.0)) r.w_increasing = false;
        if (inc > prev_inc * (1.0 + 1e-9)) r.w_concave = false;
        prev = wi;
        prev_inc = inc;
        prev_u = g.u[i];
        ++r.nodes_checked;
    }
    double wt = w.W(g.t_hat), wpt = w.W_prime(g.t_hat);
    r.boundary_residual = std::abs(e.mu * wpt - wt * (1.0 - sol.int_H(g.t_hat)));
    return r;
}

}  // namespace rdcp
