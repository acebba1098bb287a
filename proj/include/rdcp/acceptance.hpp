#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "rdcp/experiments.hpp"

namespace rdcp {

struct ResultRow {
    std::string experiment;
    std::string params;
    std::string metric;
    double value = 0.0;
    std::string tolerance;
    bool pass = true;
    bool info = false;  // reported only; not part of the verdict
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<ResultRow> rows;
    double seconds = 0.0;
    double budget_seconds = 0.0;  // 0 = no runtime budget

    bool metrics_pass() const {
        bool ok = !rows.empty();
        for (const auto& r : rows)
            if (!r.info) ok = ok && r.pass;
        return ok;
    }
    bool runtime_pass() const { return budget_seconds <= 0.0 || seconds < budget_seconds; }
    bool pass() const { return metrics_pass() && runtime_pass(); }
};

namespace acceptance {

inline ResultRow below(std::string exp, std::string params, std::string metric, double value, double tol) {
    return {std::move(exp), std::move(params), std::move(metric), value, "< " + fmt_num(tol), value < tol, false};
}

inline ResultRow check(std::string exp, std::string params, std::string metric, double value, std::string tol, bool ok) {
    return {std::move(exp), std::move(params), std::move(metric), value, std::move(tol), ok, false};
}

inline ResultRow info(std::string exp, std::string params, std::string metric, double value) {
    return {std::move(exp), std::move(params), std::move(metric), value, "", true, true};
}

/// Gauss-Legendre on every stored step of the solution.
template <class Fn>
double integrate_on_grid(const LambdaSolution& sol, Fn&& fn) {
    namespace q = boost::math::quadrature;
    const auto& t = sol.trajectory().t;
    double total = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) total += q::gauss<double, 10>::integrate(fn, t[j], t[j + 1]);
    return total;
}

inline CriterionResult ode_sanity() {
    CriterionResult c{1, "ODE sanity", {}, 0.0, 0.0};
    double worst = 0.0;
    for (std::string spec : {"2:1", "3:1", "2:0.5,4:0.5"}) {
        auto t0 = std::chrono::steady_clock::now();
        auto dist = DegreeDistribution::parse(spec);
        LambdaSolution sol = solve_for(dist, 1e-11);
        double l0 = sol.lambda(0.0);
        double lp0 = sol.lambda_prime(0.0);
        double int_f = integrate_on_grid(sol, [&](double t) { return sol.f(t); });
        double int_h = integrate_on_grid(sol, [&](double t) { return sol.H(t); });
        double f_gap = std::abs(sol.F(sol.horizon()) - dist.mean());
        worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        c.rows.push_back(check("lambda_ivp", spec, "lambda(0)", l0, "== 0", l0 == 0.0));
        c.rows.push_back(below("lambda_ivp", spec, "|lambda'(0)-1|", std::abs(lp0 - 1.0), 1e-12));
        c.rows.push_back(check("lambda_ivp", spec, "int_f", int_f, "[1-1e-4, 1]", int_f >= 1.0 - 1e-4 && int_f <= 1.0));
        c.rows.push_back(check("lambda_ivp", spec, "int_H", int_h, "[1-1e-4, 1]", int_h >= 1.0 - 1e-4 && int_h <= 1.0));
        c.rows.push_back(below("lambda_ivp", spec, "|F(horizon)-E(D)|", f_gap, 1e-3));
    }
    c.seconds = worst;
    c.budget_seconds = 1.0;
    return c;
}

inline CriterionResult taylor_oracle() {
    CriterionResult c{2, "Taylor oracle", {}, 0.0, 0.0};
    auto dist = DegreeDistribution::parse("2:1");
    LambdaSolution sol = solve_for(dist, 1e-11);
    const double t = 0.1;
    double lam = sol.lambda(t), F = sol.F(t);
    c.rows.push_back(below("taylor", "2:1 t=0.1", "|lambda-(t-t^3/6)|", std::abs(lam - (t - t * t * t / 6.0)), 2e-6));
    c.rows.push_back(below("taylor", "2:1 t=0.1", "|F-(t-t^3/3)|", std::abs(F - (t - t * t * t / 3.0)), 1e-5));
    // with the quartic terms: lambda' = 1 - t^2/2 + t^3/3 + O(t^4)
    c.rows.push_back(info("taylor", "2:1 t=0.1", "|lambda-(t-t^3/6+t^4/12)|", std::abs(lam - (t - std::pow(t, 3) / 6.0 + std::pow(t, 4) / 12.0))));
    c.rows.push_back(info("taylor", "2:1 t=0.1", "|F-(t-t^3/3+t^4/6)|", std::abs(F - (t - std::pow(t, 3) / 3.0 + std::pow(t, 4) / 6.0))));
    return c;
}

/// Connected G(n, 1/2) on n vertices.
inline HostGraph small_random_host(std::size_t n, Rng& rng) {
    while (true) {
        std::vector<Edge> edges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (uniform01(rng) < 0.5) edges.emplace_back(u, v);
        if (edges.empty()) continue;
        HostGraph g = HostGraph::from_edges(n, edges);
        if (g.is_connected()) return g;
    }
}

inline CriterionResult exploration_oracle(std::uint64_t seed) {
    CriterionResult c{3, "Exploration-recursion oracle", {}, 0.0, 0.0};
    const int instances = 200;
    int matched = 0, alarms = 0, nontrivial = 0;
    for (int i = 0; i < instances; ++i) {
        int d = 2 + (i % 2);
        double t_hat = (i / 2) % 2 ? 1.5 : 0.5;
        int R = 1 + (i / 4) % 2;
        Rng rng = stream_rng(seed, Stream::check, static_cast<std::uint64_t>(i));
        std::size_t n = 4 + uniform_below(rng, 9);
        HostGraph host = small_random_host(n, rng);
        std::vector<int> cons(n, d);
        Vertex root = static_cast<Vertex>(uniform_below(rng, n));
        while (true) {
            auto times = draw_activation_times(host, rng);
            auto nodes = explore_host(host, cons, times, root, t_hat, R);
            if (!nodes) {
                ++alarms;
                continue;
            }
            auto reconstructed = ball_from_exploration(*nodes, truncated_phantom_times(*nodes), R).ball_code(R);
            auto direct = simulate_with_times(host, cons, times, StopRule::until_time(t_hat));
            auto truth = neighborhood(direct, root, R);
            if (reconstructed == truth) ++matched;
            if (truth != single_vertex_code()) ++nontrivial;
            break;
        }
    }
    c.rows.push_back(check("exploration", "200 hosts n<=12 d in {2,3} t_hat in {0.5,1.5} R in {1,2}", "matched", matched,
                           "== 200", matched == instances));
    c.rows.push_back(info("exploration", "", "nontrivial_balls", nontrivial));
    c.rows.push_back(info("exploration", "", "alarm_resamples", alarms));
    return c;
}

inline CriterionResult two_sampler(std::uint64_t seed, unsigned threads) {
    CriterionResult c{4, "Two-sampler law equality", {}, 0.0, 120.0};
    auto t0 = std::chrono::steady_clock::now();
    auto dist = DegreeDistribution::parse("3:1");
    LambdaSolution sol = solve_for(dist, 1e-11);
    const std::size_t N = 100000;
    auto a = make_census(limit_codes(sol, 0.6, 2, N, "mtbp", seed, threads));
    auto b = make_census(limit_codes(sol, 0.6, 2, N, "pwit", seed, threads));
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.rows.push_back(below("two_sampler", "3:1 t_hat=0.6 R=2 N=100000", "tv", tv_distance(a, b), 0.01));
    c.rows.push_back(info("two_sampler", "", "classes_mtbp", static_cast<double>(a.size())));
    c.rows.push_back(info("two_sampler", "", "classes_pwit", static_cast<double>(b.size())));
    return c;
}

inline CriterionResult local_limit(std::uint64_t seed, unsigned threads) {
    CriterionResult c{5, "Local-limit convergence at finite n", {}, 0.0, 300.0};
    auto t0 = std::chrono::steady_clock::now();
    auto dist = DegreeDistribution::parse("3:1");
    LambdaSolution sol = solve_for(dist, 1e-11);
    HostGraph host = HostGraph::complete(10000);
    ExperimentConfig cfg;
    cfg.t = 0.75;
    cfg.R = 1;
    cfg.samples = 100000;
    cfg.seed = seed;
    cfg.threads = static_cast<int>(threads);
    auto rep = compare_censuses(host, dist, sol, cfg);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string p = "K_10000 3:1 t_hat=0.75";
    c.rows.push_back(below("local_limit", p, "|unsat_frac-lambda'(0.75)|", std::abs(rep.summary.unsat_frac - sol.lambda_prime(0.75)), 0.01));
    c.rows.push_back(below("local_limit", p, "|edges/n-F(0.75)/2|", std::abs(static_cast<double>(rep.summary.edges) / 1e4 - sol.F(0.75) / 2.0), 0.01));
    c.rows.push_back(below("local_limit", p + " R=1 N=100000", "tv", rep.tv[1], 0.03));
    return c;
}

inline CriterionResult spectral_criticality() {
    CriterionResult c{6, "Spectral = ODE criticality", {}, 0.0, 0.0};
    auto dist = DegreeDistribution::parse("3:1");
    LambdaSolution sol = solve_for(dist, 1e-11);
    auto rep = critical_time(sol);
    auto grid = build_grid(sol, rep.t_hat_c, 2000);
    auto eig = principal_eigenvalue(grid);
    auto cc = eigenfunction_crosscheck(grid, eig, sol);
    c.rows.push_back(below("spectral", "3:1 G=2000 t_hat=t_hat_c", "|mu-1|", std::abs(eig.mu - 1.0), 5e-3));
    c.rows.push_back(below("spectral", "3:1 G=2000 t_hat=t_hat_c", "w_rel_deviation", cc.max_rel_dev, 1e-2));
    c.rows.push_back(below("spectral", "3:1 G=2000 t_hat=t_hat_c", "boundary_residual", cc.boundary_residual, 1e-2));
    c.rows.push_back(check("spectral", "3:1 G=2000 t_hat=t_hat_c", "w_increasing_concave", cc.w_increasing && cc.w_concave,
                           "== 1", cc.w_increasing && cc.w_concave));
    double prev = 0.0;
    bool increasing = true;
    for (int k = 1; k <= 10; ++k) {
        double th = 0.2 * k;
        double mu = principal_eigenvalue(build_grid(sol, th, 2000)).mu;
        c.rows.push_back(info("spectral_ladder", "3:1 G=2000 t_hat=" + fmt_num(th), "mu", mu));
        if (k > 1 && !(mu > prev)) increasing = false;
        prev = mu;
    }
    c.rows.push_back(check("spectral_ladder", "3:1 G=2000 t_hat=0.2..2.0", "mu_strictly_increasing", increasing, "== 1", increasing));
    return c;
}

inline CriterionResult asymptotics() {
    CriterionResult c{7, "Critical-time asymptotics", {}, 0.0, 60.0};
    auto t0 = std::chrono::steady_clock::now();
    double prev_gap = 1e300;
    bool monotone = true;
    for (int d = 5; d <= 9; ++d) {
        auto dist = DegreeDistribution::from_pmf({{d, 1.0}});
        LambdaSolution sol = solve_for(dist, 1e-11);
        auto rep = critical_time(sol);
        std::string p = std::to_string(d) + ":1 abs_tol=1e-11";
        c.rows.push_back(info("asymptotics", p, "t_hat_c", rep.t_hat_c));
        c.rows.push_back(check("asymptotics", p, "ratio", rep.ratio, "[0.8, 1.2]", rep.ratio >= 0.8 && rep.ratio <= 1.2));
        c.rows.push_back(check("asymptotics", p, "t_c", rep.t_c, "> 0.5", rep.t_c > 0.5));
        double gap = std::abs(rep.ratio - 1.0);
        if (gap > prev_gap) monotone = false;
        prev_gap = gap;
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.rows.push_back(check("asymptotics", "d=5..9", "|ratio-1|_non_increasing", monotone, "== 1", monotone));
    return c;
}

inline CriterionResult phase_bracket(std::uint64_t seed, unsigned threads) {
    CriterionResult c{8, "Phase-transition bracketing", {}, 0.0, 600.0};
    auto t0 = std::chrono::steady_clock::now();
    auto dist = DegreeDistribution::parse("3:1");
    auto rep = critical_time(dist, 1e-11);
    auto rows = bracket(dist, rep.t_hat_c, {5000, 20000}, {0.9, 1.1}, 20, seed, threads);
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& r : rows) {
        std::string p = "K_" + std::to_string(r.n) + " 3:1 factor=" + fmt_num(r.factor);
        c.rows.push_back(info("bracket", p, "mean_largest_frac", r.largest_frac.mean));
        c.rows.push_back(info("bracket", p, "stderr_largest_frac", r.largest_frac.stderr_));
    }
    double sub5 = rows[0].largest_frac.mean, sup5 = rows[1].largest_frac.mean;
    double sub20 = rows[2].largest_frac.mean, sup20 = rows[3].largest_frac.mean;
    double drop = (sub5 - sub20) / sub5;
    double change = std::abs(sup20 - sup5) / sup5;
    c.rows.push_back(check("bracket", "factor=0.9 n 5000->20000", "relative_decrease", drop, ">= 0.3", drop >= 0.3));
    c.rows.push_back(below("bracket", "factor=1.1 n 5000->20000", "relative_change", change, 0.2));
    return c;
}

inline void write_criterion(const std::filesystem::path& dir, std::uint64_t seed, const CriterionResult& c) {
    Metadata meta{{"command", "selftest"}, {"seed", std::to_string(seed)}, {"criterion", std::to_string(c.id)}, {"name", c.name}};
    CsvWriter w(dir / ("criterion_" + std::to_string(c.id) + ".csv"), meta,
                {"experiment", "params", "metric", "value", "tolerance", "pass"});
    for (const auto& r : c.rows)
        w.row({r.experiment, r.params, r.metric, fmt_num(r.value), r.tolerance, r.info ? "info" : (r.pass ? "pass" : "fail")});
}

}  // namespace acceptance

inline std::string verdict_line(const CriterionResult& c) {
    std::ostringstream os;
    os << (c.pass() ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.name;
    for (const auto& r : c.rows)
        if (!r.info && !r.pass) os << " [" << r.metric << " (" << r.params << ") = " << fmt_num(r.value) << ", need " << r.tolerance << "]";
    if (c.budget_seconds > 0.0)
        os << " (" << std::fixed << std::setprecision(1) << c.seconds << " s of " << c.budget_seconds << " s budget"
           << (c.runtime_pass() ? "" : ", OVER BUDGET") << ")";
    return os.str();
}

/// Criteria 1-8. Writes one CSV per criterion plus acceptance.csv to out_dir and
/// a verdict line per criterion to log. Output files hold no timings.
inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::filesystem::path& out_dir, unsigned threads,
                                                   std::ostream& log) {
    using namespace acceptance;
    std::vector<std::function<CriterionResult()>> steps{
        [] { return ode_sanity(); },
        [] { return taylor_oracle(); },
        [&] { return exploration_oracle(seed); },
        [&] { return two_sampler(seed, threads); },
        [&] { return local_limit(seed, threads); },
        [] { return spectral_criticality(); },
        [] { return asymptotics(); },
        [&] { return phase_bracket(seed, threads); },
    };
    std::vector<CriterionResult> results;
    for (auto& step : steps) {
        auto t0 = std::chrono::steady_clock::now();
        CriterionResult c = step();
        if (c.budget_seconds <= 0.0) c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_criterion(out_dir, seed, c);
        log << verdict_line(c) << std::endl;
        results.push_back(std::move(c));
    }
    CsvWriter w(out_dir / "acceptance.csv", {{"command", "selftest"}, {"seed", std::to_string(seed)}},
                {"criterion", "name", "metrics_pass"});
    for (const auto& c : results) w.row({std::to_string(c.id), c.name, c.metrics_pass() ? "pass" : "fail"});
    return results;
}

}  // namespace rdcp
