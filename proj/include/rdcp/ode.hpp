#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rdcp {

/// Accepted steps of an integration, interpolated by cubic Hermite using the
/// stored derivative at each node.
template <std::size_t N>
struct Trajectory {
    using State = std::array<double, N>;

    std::vector<double> t;
    std::vector<State> y;
    std::vector<State> dy;

    std::size_t size() const { return t.size(); }
    double t_front() const { return t.front(); }
    double t_back() const { return t.back(); }

    /// Index j with t[j] <= x <= t[j+1] (clamped to the stored range).
    std::size_t interval(double x) const {
        if (x <= t.front()) return 0;
        if (x >= t.back()) return t.size() - 2;
        auto it = std::upper_bound(t.begin(), t.end(), x);
        return static_cast<std::size_t>(it - t.begin()) - 1;
    }

    double eval_in(std::size_t j, double x, std::size_t c) const {
        double h = t[j + 1] - t[j];
        double s = (x - t[j]) / h;
        double s2 = s * s, s3 = s2 * s;
        double h00 = 2 * s3 - 3 * s2 + 1;
        double h10 = s3 - 2 * s2 + s;
        double h01 = -2 * s3 + 3 * s2;
        double h11 = s3 - s2;
        return h00 * y[j][c] + h10 * h * dy[j][c] + h01 * y[j + 1][c] + h11 * h * dy[j + 1][c];
    }

    double eval(double x, std::size_t c) const {
        if (t.size() == 1) return y[0][c];
        return eval_in(interval(x), x, c);
    }

    State eval(double x) const {
        State out{};
        if (t.size() == 1) return y[0];
        std::size_t j = interval(x);
        for (std::size_t c = 0; c < N; ++c) out[c] = eval_in(j, x, c);
        return out;
    }
};

struct StepControl {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double h_init = 1e-3;
    double h_max = 1e300;
    std::size_t max_steps = 50'000'000;
};

/// Dormand-Prince 5(4) with max-norm local error control. The error norm also
/// bounds the gap between the cubic Hermite interpolant and the method's own
/// continuous extension, so stored trajectories interpolate to tolerance. Integrates from t0
/// until t_end or until stop(t, y, dy) returns true after an accepted step.
template <std::size_t N, class Rhs, class Stop>
Trajectory<N> integrate_dopri5(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end,
                               const StepControl& ctl, Stop&& stop) {
    using State = std::array<double, N>;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    Trajectory<N> tr;
    double t = t0;
    State y = y0;
    State k1 = rhs(t, y);
    tr.t.push_back(t);
    tr.y.push_back(y);
    tr.dy.push_back(k1);

    double h = std::min(ctl.h_init, t_end - t0);
    std::size_t steps = 0;
    State tmp, k2, k3, k4, k5, k6, k7, yn;
    while (t < t_end) {
        if (++steps > ctl.max_steps) throw std::runtime_error("ode: step limit exceeded");
        h = std::min({h, ctl.h_max, t_end - t});
        if (h < 1e-15 * std::max(1.0, std::abs(t))) throw std::runtime_error("ode: step size underflow");

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + c2 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + h, tmp);
        for (std::size_t i = 0; i < N; ++i)
            yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        double tn = (t_end - t - h <= 1e-15 * std::abs(t_end)) ? t_end : t + h;
        k7 = rhs(tn, yn);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(yn[i]));
            err = std::max(err, std::abs(e) / sc);
            // defect of the cubic Hermite interpolant at the step midpoint
            double dense = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            err = std::max(err, std::abs(dense) / 16.0 / sc);
        }
        if (!std::isfinite(err)) {
            h *= 0.1;
            continue;
        }
        if (err <= 1.0) {
            t = tn;
            y = yn;
            k1 = k7;
            tr.t.push_back(t);
            tr.y.push_back(y);
            tr.dy.push_back(k1);
            double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h *= fac;
            if (stop(t, y, k1)) break;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
        }
    }
    return tr;
}

template <std::size_t N, class Rhs>
Trajectory<N> integrate_dopri5(Rhs&& rhs, double t0, std::array<double, N> y0, double t_end, const StepControl& ctl) {
    return integrate_dopri5<N>(std::forward<Rhs>(rhs), t0, y0, t_end, ctl,
                               [](double, const std::array<double, N>&, const std::array<double, N>&) { return false; });
}

/// Bisection for a sign change of g on [lo, hi]; g(lo) and g(hi) must differ in sign.
template <class G>
double bisect(G&& g, double lo, double hi, double tol, int max_iter = 400) {
    double glo = g(lo);
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace rdcp
