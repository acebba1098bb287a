#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdcp/lambda_solution.hpp"
#include "rdcp/ode.hpp"

namespace rdcp {

/// W'' = -H W, W(0) = 0, W'(0) = 1, integrated jointly with lambda.
/// State components: lambda, W, W'.
struct WSolution {
    Trajectory<3> traj;
    double theta = std::numeric_limits<double>::infinity();
    bool theta_found = false;
    bool shape_ok = true;  // W > 0, W' > 0, W'' <= 0 on (0, theta)

    double lambda(double t) const { return traj.eval(t, 0); }
    double W(double t) const { return traj.eval(t, 1); }
    double W_prime(double t) const { return traj.eval(t, 2); }
};

inline WSolution solve_W(const LambdaSolution& sol, double mu = 1.0, double t_end = -1.0) {
    const LambdaForms& forms = sol.forms();
    StepControl ctl;
    ctl.abs_tol = sol.options().abs_tol;
    ctl.rel_tol = sol.options().abs_tol;
    ctl.h_init = 1e-3;
    auto rhs = [&forms, mu](double, const std::array<double, 3>& y) {
        double lp = forms.psi(y[0]);
        return std::array<double, 3>{lp, y[2], -lp * forms.phi2(y[0]) * y[1] / mu};
    };
    bool to_end = t_end > 0.0;
    double end = to_end ? t_end : sol.horizon();
    WSolution out;
    out.traj = integrate_dopri5<3>(rhs, 0.0, {0.0, 0.0, 1.0}, end, ctl,
                                   [to_end](double, const auto& y, const auto&) { return !to_end && y[2] < 0.0; });
    const auto& tr = out.traj;
    for (std::size_t j = 1; j < tr.size(); ++j) {
        if (tr.y[j][2] < 0.0) {
            out.theta = bisect([&](double x) { return tr.eval_in(j - 1, x, 2); }, tr.t[j - 1], tr.t[j], 1e-13);
            out.theta_found = true;
            break;
        }
        if (!(tr.y[j][1] > 0.0) || tr.dy[j][2] > 0.0) out.shape_ok = false;
    }
    return out;
}

struct CriticalTimeReport {
    std::string dist;
    double t_hat_c = std::numeric_limits<double>::quiet_NaN();
    double t_c = std::numeric_limits<double>::quiet_NaN();
    double theta = std::numeric_limits<double>::quiet_NaN();
    double delta = std::numeric_limits<double>::quiet_NaN();
    double I = std::numeric_limits<double>::quiet_NaN();
    double J = std::numeric_limits<double>::quiet_NaN();
    double asymptotic_ref = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    double mu_at_tc = std::numeric_limits<double>::quiet_NaN();
    bool below_resolution = false;
    bool theta_found = true;
    bool gamma_monotone = true;
    bool w_shape_ok = true;

    std::string flags() const {
        std::string s;
        auto add = [&](const char* f) {
            if (!s.empty()) s += ';';
            s += f;
        };
        if (below_resolution) add("below_resolution");
        if (!theta_found) add("theta_not_found");
        if (!gamma_monotone) add("gamma_not_monotone");
        if (!w_shape_ok) add("w_shape");
        return s.empty() ? "ok" : s;
    }
};

/// gamma(t) = W'(t) - W(t) (1 - int_0^t H)
inline double gamma_at(const WSolution& w, const LambdaForms& forms, double t) {
    auto y = w.traj.eval(t);
    return y[2] - y[1] * (1.0 - forms.int_h(y[0]));
}

inline double gamma_node(const WSolution& w, const LambdaForms& forms, std::size_t j) {
    const auto& y = w.traj.y[j];
    return y[2] - y[1] * (1.0 - forms.int_h(y[0]));
}

/// Resolution floor for t_hat_c - 1 relative to the solver tolerance.
inline bool is_below_resolution(double asymptotic_ref, double abs_tol) { return asymptotic_ref < 1000.0 * abs_tol; }

inline CriticalTimeReport critical_time(const LambdaSolution& sol, double root_tol = 1e-12) {
    const LambdaForms& forms = sol.forms();
    const DegreeDistribution& dist = sol.dist();
    CriticalTimeReport r;
    r.dist = dist.to_string();

    WSolution w = solve_W(sol);
    r.theta_found = w.theta_found;
    r.theta = w.theta_found ? w.theta : std::numeric_limits<double>::infinity();
    r.w_shape_ok = w.shape_ok;

    const auto& tr = w.traj;
    std::size_t j_neg = 0;
    double prev = gamma_node(w, forms, 0);
    for (std::size_t j = 1; j < tr.size(); ++j) {
        if (tr.t[j] > r.theta && w.theta_found && tr.t[j - 1] >= r.theta) break;
        double g = gamma_node(w, forms, j);
        if (g > prev + 1e-12) r.gamma_monotone = false;
        prev = g;
        if (g < 0.0) {
            j_neg = j;
            break;
        }
    }
    if (j_neg == 0) throw std::runtime_error("critical_time: gamma has no sign change (solver resolution failure)");
    r.t_hat_c = bisect([&](double x) { return gamma_at(w, forms, x); }, tr.t[j_neg - 1], tr.t[j_neg], root_tol);
    if (w.theta_found && !(r.t_hat_c < r.theta)) r.gamma_monotone = false;
    r.t_c = sol.F(r.t_hat_c) / 2.0;

    namespace q = boost::math::quadrature;
    r.delta = q::gauss_kronrod<double, 31>::integrate([&](double s) { return sol.H(s) * (1.0 - s * s); }, 0.0, 1.0, 15,
                                                      1e-14);
    r.I = sol.int_H(1.0 + 2.0 * r.delta);
    r.J = 1.0 - sol.lambda(1.0);
    r.asymptotic_ref = 2.0 / std::exp(1.0) * dist.inv_factorial_moment();
    r.below_resolution = is_below_resolution(r.asymptotic_ref, sol.options().abs_tol);
    if (!r.below_resolution) r.ratio = (r.t_hat_c - 1.0) / r.asymptotic_ref;
    return r;
}

inline CriticalTimeReport critical_time(const DegreeDistribution& dist, double abs_tol = 1e-11) {
    LambdaOptions opt;
    opt.abs_tol = abs_tol;
    LambdaSolution sol(dist, opt);
    return critical_time(sol);
}

}  // namespace rdcp
