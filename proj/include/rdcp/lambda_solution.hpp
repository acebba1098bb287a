#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdcp/degree_dist.hpp"
#include "rdcp/ode.hpp"

namespace rdcp {

/// Closed forms in the variable lambda for a fixed degree distribution.
class LambdaForms {
public:
    explicit LambdaForms(const DegreeDistribution& dist) : dist_(dist) {
        int D = dist.delta_max();
        inv_fact_.resize(D + 2);
        inv_fact_[0] = 1.0;
        for (int k = 1; k <= D + 1; ++k) inv_fact_[k] = inv_fact_[k - 1] / k;
        k0_ = dist.k_min() - 1;
    }

    const DegreeDistribution& dist() const { return dist_; }

    /// lambda' as a function of lambda: e^{-l} sum_{k<D} l^k/k! q_{k+1}
    double psi(double l) const { return poisson_sum(l, 0, 1, false); }
    /// e^{-l} sum l^k/k! p_{k+1}; f = psi * phi1
    double phi1(double l) const { return poisson_sum(l, 0, 1, true); }
    /// e^{-l} sum l^k/k! p_{k+2}; H = psi * phi2
    double phi2(double l) const { return poisson_sum(l, 0, 2, true); }
    /// integral of H from 0: 1 - e^{-l} sum l^k/k! q_{k+2}
    double int_h(double l) const { return 1.0 - poisson_sum(l, 0, 2, false); }

    /// sum k z_k / sum z_k; the l -> 0 limit is k_min - 1.
    double expected_children(double l) const {
        double num = 0.0, den = 0.0, term = 1.0;
        for (int k = k0_; k <= dist_.delta_max() - 1; ++k) {
            double b = term * inv_fact_[k] * dist_.p(k + 1);
            num += k * b;
            den += b;
            term *= l;
        }
        return num / den;
    }

    /// z_k = e^{-l} l^k/k! p_{k+1}
    double z(double l, int k) const {
        if (k < 0 || k > dist_.delta_max()) return 0.0;
        return std::exp(-l) * std::pow(l, k) * inv_fact_[k] * dist_.p(k + 1);
    }

    /// Constraint law given type: p_k^t proportional to l^{k-1}/(k-1)! p_k. Entry k of the result.
    std::vector<double> constraint_weights(double l) const {
        std::vector<double> w(dist_.delta_max() + 1, 0.0);
        double term = 1.0, total = 0.0;
        for (int k = k0_ + 1; k <= dist_.delta_max(); ++k) {
            w[k] = term * inv_fact_[k - 1] * dist_.p(k);
            total += w[k];
            term *= l;
        }
        for (double& x : w) x /= total;
        return w;
    }

    /// Inverse of psi on (0, 1].
    double psi_inverse(double u) const {
        if (!(u > 0.0) || u > 1.0) throw std::domain_error("psi_inverse: argument outside (0,1]");
        if (u == 1.0) return 0.0;
        double hi = 1.0;
        while (psi(hi) > u) hi *= 2.0;
        return bisect([&](double l) { return psi(l) - u; }, 0.0, hi, 1e-15 * hi, 200);
    }

private:
    // e^{-l} sum_{k=kfrom}^{D-shift} l^k/k! c_{k+shift}, c = p or q
    double poisson_sum(double l, int kfrom, int shift, bool use_p) const {
        double s = 0.0, term = 1.0;
        for (int k = 0; k + shift <= dist_.delta_max(); ++k) {
            if (k >= kfrom) s += term * inv_fact_[k] * (use_p ? dist_.p(k + shift) : dist_.q(k + shift));
            term *= l;
        }
        return std::exp(-l) * s;
    }

    DegreeDistribution dist_;
    std::vector<double> inv_fact_;
    int k0_ = 1;
};

struct LambdaOptions {
    double abs_tol = 1e-11;
    double cutoff = 1e-8;
    double t_cap = 1e12;
};

/// Dense solution of lambda' = psi(lambda), lambda(0) = 0, carried together with
/// F' = (lambda')^2. Past the stored horizon values come from t(l) = int dl/psi(l).
class LambdaSolution {
public:
    LambdaSolution(const DegreeDistribution& dist, const LambdaOptions& opt = {}) : forms_(dist), opt_(opt) {
        if (!(opt.abs_tol >= 1e-13 && opt.abs_tol <= 1e-6))
            throw std::invalid_argument("solve_lambda: abs_tol must lie in [1e-13, 1e-6]");
        StepControl ctl;
        ctl.abs_tol = opt.abs_tol;
        ctl.rel_tol = opt.abs_tol;
        ctl.h_init = 1e-3;
        auto rhs = [this](double, const std::array<double, 2>& y) {
            double lp = forms_.psi(y[0]);
            return std::array<double, 2>{lp, lp * lp};
        };
        double cutoff = opt.cutoff;
        traj_ = integrate_dopri5<2>(rhs, 0.0, {0.0, 0.0}, opt.t_cap, ctl,
                                    [cutoff](double, const auto&, const auto& dy) { return dy[0] < cutoff; });
        traj_.y[0][0] = 0.0;
        double lh = traj_.y.back()[0];
        namespace q = boost::math::quadrature;
        f_inf_ = traj_.y.back()[1] +
                 q::gauss_kronrod<double, 31>::integrate([this](double l) { return forms_.psi(l); }, lh, lh + 200.0, 15, 1e-14);
    }

    const LambdaForms& forms() const { return forms_; }
    const DegreeDistribution& dist() const { return forms_.dist(); }
    const LambdaOptions& options() const { return opt_; }
    const Trajectory<2>& trajectory() const { return traj_; }
    double horizon() const { return traj_.t_back(); }
    double lambda_at_horizon() const { return traj_.y.back()[0]; }

    double lambda(double t) const {
        check_time(t);
        if (t <= horizon()) return traj_.eval(t, 0);
        return lambda_beyond(t);
    }
    double lambda_prime(double t) const { return forms_.psi(lambda(t)); }
    double f(double t) const {
        double l = lambda(t);
        return forms_.psi(l) * forms_.phi1(l);
    }
    double H(double t) const {
        double l = lambda(t);
        return forms_.psi(l) * forms_.phi2(l);
    }
    double E(double t) const { return forms_.expected_children(lambda(t)); }
    double rho(double t) const {
        double l = lambda(t);
        return l * forms_.psi(l) * forms_.phi1(l) / forms_.expected_children(l);
    }
    double z(double t, int k) const { return forms_.z(lambda(t), k); }
    double int_H(double t) const { return forms_.int_h(lambda(t)); }
    /// Gamma(t) = P(T <= t) = 1 - lambda'(t)
    double cdf(double t) const { return 1.0 - lambda_prime(t); }
    /// A(t) = int_0^t s f(s) ds = lambda(t) - t lambda'(t)
    double partial_mean(double t) const {
        double l = lambda(t);
        return l - t * forms_.psi(l);
    }

    double eval(const std::string& which, double t, int k = 0) const {
        if (which == "f") return f(t);
        if (which == "H") return H(t);
        if (which == "E") return E(t);
        if (which == "rho") return rho(t);
        if (which == "z") return z(t, k);
        throw std::invalid_argument("eval_derived: unknown function '" + which + "'");
    }

    double F(double t) const {
        check_time(t);
        if (t <= horizon()) return traj_.eval(t, 1);
        return traj_.y.back()[1] + psi_integral(lambda_at_horizon(), lambda_beyond(t));
    }
    double F_infinity() const { return f_inf_; }

    double F_inverse(double s) const {
        if (!(s >= 0.0)) throw std::domain_error("F_inverse: s must be >= 0");
        if (s >= dist().mean()) throw std::domain_error("F_inverse: s must be < E(D)");
        if (s == 0.0) return 0.0;
        double fh = traj_.y.back()[1];
        if (s <= fh) {
            auto it = std::lower_bound(traj_.y.begin(), traj_.y.end(), s,
                                       [](const auto& y, double v) { return y[1] < v; });
            std::size_t j = static_cast<std::size_t>(it - traj_.y.begin());
            if (j == 0) return 0.0;
            double lo = traj_.t[j - 1], hi = traj_.t[j];
            return bisect([&](double x) { return traj_.eval_in(j - 1, x, 1) - s; }, lo, hi, 0.0, 200);
        }
        if (s >= f_inf_) return std::numeric_limits<double>::infinity();
        double lh = lambda_at_horizon();
        double hi = lh + 1.0;
        while (fh + psi_integral(lh, hi) < s) hi = lh + 2.0 * (hi - lh);
        double l = bisect([&](double x) { return fh + psi_integral(lh, x) - s; }, lh, hi, 0.0, 200);
        return time_of_lambda(l);
    }

    /// t with lambda(t) = l.
    double time_of_lambda(double l) const {
        if (l <= 0.0) return 0.0;
        double lh = lambda_at_horizon();
        if (l > lh) return horizon() + inverse_psi_integral(lh, l);
        auto it = std::lower_bound(traj_.y.begin(), traj_.y.end(), l, [](const auto& y, double v) { return y[0] < v; });
        std::size_t j = static_cast<std::size_t>(it - traj_.y.begin());
        if (j == 0) return 0.0;
        return bisect([&](double x) { return traj_.eval_in(j - 1, x, 0) - l; }, traj_.t[j - 1], traj_.t[j],
                      1e-15 * traj_.t[j], 200);
    }

    /// t with lambda'(t) = u, u in (0, 1].
    double survival_inverse(double u) const { return time_of_lambda(forms_.psi_inverse(u)); }

    /// s in [0, t] with A(s) = a.
    double partial_mean_inverse(double a, double t) const {
        if (a <= 0.0) return 0.0;
        return bisect([&](double s) { return partial_mean(s) - a; }, 0.0, t, 1e-15 * t, 200);
    }

private:
    static void check_time(double t) {
        if (!(t >= 0.0)) throw std::domain_error("LambdaSolution: time must be >= 0");
    }

    double psi_integral(double a, double b) const {
        namespace q = boost::math::quadrature;
        return q::gauss_kronrod<double, 31>::integrate([this](double l) { return forms_.psi(l); }, a, b, 15, 1e-14);
    }

    double inverse_psi_integral(double a, double b) const {
        namespace q = boost::math::quadrature;
        return q::gauss_kronrod<double, 31>::integrate([this](double l) { return 1.0 / forms_.psi(l); }, a, b, 20,
                                                       1e-13);
    }

    double lambda_beyond(double t) const {
        if (std::isinf(t)) return std::numeric_limits<double>::infinity();
        double lh = lambda_at_horizon();
        double dt = t - horizon();
        double width = 1.0;
        while (inverse_psi_integral(lh, lh + width) < dt) width *= 2.0;
        double l = bisect([&](double x) { return inverse_psi_integral(lh, x) - dt; }, lh, lh + width, 0.0, 200);
        return l;
    }

    LambdaForms forms_;
    LambdaOptions opt_;
    Trajectory<2> traj_;
    double f_inf_ = 0.0;
};

}  // namespace rdcp
