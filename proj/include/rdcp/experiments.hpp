#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "rdcp/canonical.hpp"
#include "rdcp/critical.hpp"
#include "rdcp/csv.hpp"
#include "rdcp/degree_dist.hpp"
#include "rdcp/host_graph.hpp"
#include "rdcp/lambda_solution.hpp"
#include "rdcp/limit_sampler.hpp"
#include "rdcp/parallel.hpp"
#include "rdcp/rdcp_sim.hpp"
#include "rdcp/rng.hpp"
#include "rdcp/spectral.hpp"

namespace rdcp {

/// Stream families; replica j of family f uses stream_id(seed, f << 32 | j).
enum class Stream : std::uint64_t { host = 1, constraints = 2, simulation = 3, mtbp = 4, pwit = 5, bracket = 6, check = 7 };

inline Rng stream_rng(std::uint64_t seed, Stream family, std::uint64_t index) {
    return make_rng(seed, (static_cast<std::uint64_t>(family) << 32) | index);
}

struct ExperimentConfig {
    std::string command;
    std::string dist = "3:1";
    std::vector<std::string> dists;
    std::string host = "complete:1000";
    std::string until = "final";
    double t = 0.75;
    long long steps = 0;
    double s = -1.0;
    int R = 1;
    std::size_t samples = 100000;
    std::size_t runs = 1;
    std::string sampler = "mtbp";
    std::uint64_t seed = 1;
    double abs_tol = 1e-11;
    std::size_t grid = 2000;
    std::vector<double> t_hats;
    bool trajectory = false;
    bool bracket = false;
    std::vector<std::size_t> bracket_n{5000, 20000};
    std::size_t bracket_runs = 20;
    std::string out = "rdcp_out";
    int threads = 0;

    /// Full parameter echo. The thread count is left out because it never changes results.
    Metadata metadata() const {
        auto join = [](const auto& xs) {
            std::string s;
            for (const auto& x : xs) {
                if (!s.empty()) s += ' ';
                if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::string>) s += x;
                else s += fmt_num(static_cast<double>(x));
            }
            return s;
        };
        return {{"command", command},
                {"dist", dist},
                {"dists", join(dists)},
                {"host", host},
                {"until", until},
                {"t", fmt_num(t)},
                {"steps", std::to_string(steps)},
                {"s", fmt_num(s)},
                {"R", std::to_string(R)},
                {"samples", std::to_string(samples)},
                {"runs", std::to_string(runs)},
                {"sampler", sampler},
                {"seed", std::to_string(seed)},
                {"abs_tol", fmt_num(abs_tol)},
                {"grid", std::to_string(grid)},
                {"t_hats", join(t_hats)},
                {"trajectory", trajectory ? "1" : "0"},
                {"bracket", bracket ? "1" : "0"},
                {"bracket_n", join(bracket_n)},
                {"bracket_runs", std::to_string(bracket_runs)}};
    }

    StopRule stop_rule() const {
        if (until == "final") return StopRule::until_final();
        if (until == "time") return StopRule::until_time(t);
        if (until == "steps") return StopRule::until_steps(steps);
        throw std::invalid_argument("--until: expected final, time or steps (got '" + until + "')");
    }
};

inline LambdaSolution solve_for(const DegreeDistribution& dist, double abs_tol) {
    LambdaOptions opt;
    opt.abs_tol = abs_tol;
    return LambdaSolution(dist, opt);
}

struct SimSummary {
    double t = 0.0;
    std::uint64_t edges = 0;
    double unsat_frac = 0.0;
    std::uint64_t largest = 0;
    double susceptibility = 0.0;
};

inline SimSummary summarize(const RdcpState& s) {
    auto cs = component_stats(s);
    double n = static_cast<double>(s.num_vertices());
    return {s.clock, s.steps, static_cast<double>(s.unsaturated) / n, cs.largest, cs.susceptibility};
}

/// Replica j draws constraints and clocks from its own stream.
inline RdcpState simulate_replica(const HostGraph& host, const DegreeDistribution& dist, const StopRule& stop,
                                  std::uint64_t seed, Stream family, std::uint64_t j) {
    Rng rng = stream_rng(seed, family, j);
    auto constraints = assign_constraints(host, dist, rng);
    return simulate(host, std::move(constraints), stop, rng);
}

struct MeanErr {
    double mean = 0.0;
    double stderr_ = 0.0;
};

inline MeanErr mean_stderr(const std::vector<double>& xs) {
    MeanErr m;
    if (xs.empty()) return m;
    double n = static_cast<double>(xs.size());
    for (double x : xs) m.mean += x;
    m.mean /= n;
    if (xs.size() > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - m.mean) * (x - m.mean);
        m.stderr_ = std::sqrt(v / (n - 1.0) / n);
    }
    return m;
}

/// Codes of the R-ball of N limit samples, produced in fixed chunks of
/// independent streams so the result does not depend on the worker count.
inline std::vector<std::string> limit_codes(const LambdaSolution& sol, double t_hat, int R, std::size_t N,
                                            const std::string& sampler, std::uint64_t seed, unsigned threads) {
    constexpr std::size_t chunk = 1000;
    std::size_t chunks = (N + chunk - 1) / chunk;
    bool pwit = sampler == "pwit";
    if (!pwit && sampler != "mtbp") throw std::invalid_argument("--sampler: expected mtbp or pwit");
    MtbpSampler mtbp(sol);
    auto parts = parallel_map<std::vector<std::string>>(chunks, threads, [&](std::size_t c) {
        Rng rng = stream_rng(seed, pwit ? Stream::pwit : Stream::mtbp, c);
        std::size_t count = std::min(chunk, N - c * chunk);
        std::vector<std::string> codes;
        codes.reserve(count);
        SamplerCaps caps;
        caps.max_depth = R;
        for (std::size_t i = 0; i < count; ++i) {
            if (pwit) codes.push_back(pwit_explore(sol.dist(), t_hat, R, rng).ball_code(R));
            else codes.push_back(mtbp.component(t_hat, rng, caps).ball_code(R));
        }
        return codes;
    });
    std::vector<std::string> all;
    all.reserve(N);
    for (auto& p : parts) all.insert(all.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
    return all;
}

inline std::vector<std::string> finite_codes(const RdcpState& s, int R) {
    std::vector<std::string> codes(s.num_vertices());
    for (Vertex v = 0; v < s.num_vertices(); ++v) codes[v] = neighborhood(s, v, R);
    return codes;
}

inline void write_census(const std::filesystem::path& path, const Metadata& meta, const Census& c) {
    CsvWriter w(path, meta, {"code_hex", "frequency"});
    for (const auto& [code, f] : c) w.row({to_hex(code), fmt_num(f)});
}

inline HostGraph build_host(const ExperimentConfig& cfg) {
    Rng rng = stream_rng(cfg.seed, Stream::host, 0);
    return parse_host(cfg.host, rng);
}

inline Metadata with_host_diagnostics(Metadata meta, const HostGraph& host) {
    auto ds = degree_stats(host);
    meta.emplace_back("host_vertices", std::to_string(host.num_vertices()));
    meta.emplace_back("host_r_n", fmt_num(host.r_n()));
    meta.emplace_back("host_degree_min", std::to_string(ds.min_degree));
    meta.emplace_back("host_degree_max", std::to_string(ds.max_degree));
    meta.emplace_back("host_outside_fraction", fmt_num(ds.outside_fraction));
    meta.emplace_back("host_connected", host.is_connected() ? "1" : "0");
    return meta;
}

inline void warn_host(const HostGraph& host, std::ostream& log) {
    if (!host.is_connected())
        log << "warning: host graph is not connected; the almost-regular host class assumes connectivity\n";
}

inline int cmd_simulate(const ExperimentConfig& cfg, std::ostream& log) {
    auto dist = DegreeDistribution::parse(cfg.dist);
    auto stop = cfg.stop_rule();
    HostGraph host = build_host(cfg);
    warn_host(host, log);
    unsigned threads = resolve_threads(cfg.threads);
    std::filesystem::path out(cfg.out);
    auto meta = with_host_diagnostics(cfg.metadata(), host);

    auto states = parallel_map<SimSummary>(cfg.runs, threads, [&](std::size_t j) {
        return summarize(simulate_replica(host, dist, stop, cfg.seed, Stream::simulation, j));
    });
    {
        CsvWriter w(out / "summary.csv", meta, {"t", "edges", "unsat_frac", "largest", "susceptibility"});
        for (const auto& s : states)
            w.row({fmt_num(s.t), fmt_num(s.edges), fmt_num(s.unsat_frac), fmt_num(s.largest), fmt_num(s.susceptibility)});
    }
    double n = static_cast<double>(host.num_vertices());
    std::vector<double> unsat, epn, largest, sus;
    for (const auto& s : states) {
        unsat.push_back(s.unsat_frac);
        epn.push_back(static_cast<double>(s.edges) / n);
        largest.push_back(static_cast<double>(s.largest) / n);
        sus.push_back(s.susceptibility);
    }
    {
        CsvWriter w(out / "summary_stats.csv", meta, {"metric", "mean", "stderr"});
        for (auto& [name, xs] : std::vector<std::pair<std::string, std::vector<double>>>{
                 {"unsat_frac", unsat}, {"edges_per_vertex", epn}, {"largest_frac", largest}, {"susceptibility", sus}}) {
            auto m = mean_stderr(xs);
            w.row({name, fmt_num(m.mean), fmt_num(m.stderr_)});
            log << name << " = " << fmt_num(m.mean) << " +- " << fmt_num(m.stderr_) << '\n';
        }
    }
    if (cfg.trajectory) {
        RdcpState first = simulate_replica(host, dist, stop, cfg.seed, Stream::simulation, 0);
        CsvWriter w(out / "trajectory.csv", meta, {"time", "step", "u", "v"});
        std::uint64_t k = 0;
        for (const auto& e : first.edges_added) w.row({fmt_num(e.time), fmt_num(++k), fmt_num(std::uint64_t{e.u}), fmt_num(std::uint64_t{e.v})});
    }
    return 0;
}

inline int cmd_limit_census(const ExperimentConfig& cfg, std::ostream& log) {
    auto dist = DegreeDistribution::parse(cfg.dist);
    if (cfg.samples < 1) throw std::invalid_argument("--samples must be >= 1");
    LambdaSolution sol = solve_for(dist, cfg.abs_tol);
    auto codes = limit_codes(sol, cfg.t, cfg.R, cfg.samples, cfg.sampler, cfg.seed, resolve_threads(cfg.threads));
    auto census = make_census(codes);
    write_census(std::filesystem::path(cfg.out) / "census.csv", cfg.metadata(), census);
    log << census.size() << " classes from " << cfg.samples << " samples\n";
    return 0;
}

struct CompareReport {
    double t_hat = 0.0;
    std::uint64_t k = 0;
    std::vector<double> tv;
    std::vector<Census> finite;
    std::vector<Census> limit;
    SimSummary summary;
};

/// Census of the simulated graph (all vertices, pooled over runs) against
/// the limit sampler, for every radius 0..R.
inline CompareReport compare_censuses(const HostGraph& host, const DegreeDistribution& dist, const LambdaSolution& sol,
                                      const ExperimentConfig& cfg) {
    unsigned threads = resolve_threads(cfg.threads);
    CompareReport rep;
    StopRule stop;
    if (cfg.s > 0.0) {
        rep.k = static_cast<std::uint64_t>(std::floor(cfg.s * static_cast<double>(host.num_vertices())));
        rep.t_hat = sol.F_inverse(2.0 * cfg.s);
        stop = StopRule::until_steps(static_cast<long long>(rep.k));
    } else {
        rep.t_hat = cfg.t;
        stop = StopRule::until_time(cfg.t);
    }
    auto states = parallel_map<std::shared_ptr<RdcpState>>(cfg.runs, threads, [&](std::size_t j) {
        return std::make_shared<RdcpState>(simulate_replica(host, dist, stop, cfg.seed, Stream::simulation, j));
    });
    rep.summary = summarize(*states.front());
    for (int r = 0; r <= cfg.R; ++r) {
        std::vector<std::string> codes;
        for (auto& s : states) {
            auto c = finite_codes(*s, r);
            codes.insert(codes.end(), c.begin(), c.end());
        }
        rep.finite.push_back(make_census(codes));
        rep.limit.push_back(make_census(limit_codes(sol, rep.t_hat, r, cfg.samples, cfg.sampler, cfg.seed, threads)));
        rep.tv.push_back(tv_distance(rep.finite.back(), rep.limit.back()));
    }
    return rep;
}

inline int cmd_compare(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.R < 0 || cfg.R > 4) throw std::invalid_argument("--R must lie in 0..4");
    if (cfg.samples < 1000) log << "warning: fewer than 1000 limit samples\n";
    auto dist = DegreeDistribution::parse(cfg.dist);
    HostGraph host = build_host(cfg);
    warn_host(host, log);
    LambdaSolution sol = solve_for(dist, cfg.abs_tol);
    auto rep = compare_censuses(host, dist, sol, cfg);
    auto meta = with_host_diagnostics(cfg.metadata(), host);
    meta.emplace_back("t_hat_used", fmt_num(rep.t_hat));
    meta.emplace_back("steps_used", std::to_string(rep.k));
    std::filesystem::path out(cfg.out);
    CsvWriter w(out / "compare.csv", meta, {"R", "N", "tv"});
    for (int r = 0; r <= cfg.R; ++r) {
        w.row({std::to_string(r), std::to_string(cfg.samples), fmt_num(rep.tv[r])});
        write_census(out / ("census_finite_R" + std::to_string(r) + ".csv"), meta, rep.finite[r]);
        write_census(out / ("census_limit_R" + std::to_string(r) + ".csv"), meta, rep.limit[r]);
        log << "R=" << r << " tv=" << fmt_num(rep.tv[r]) << '\n';
    }
    return 0;
}

struct BracketRow {
    std::size_t n = 0;
    double factor = 0.0;
    double t = 0.0;
    MeanErr largest_frac;
};

/// Largest-component fraction on K_n at factor * t_hat_c.
inline std::vector<BracketRow> bracket(const DegreeDistribution& dist, double t_hat_c, const std::vector<std::size_t>& ns,
                                       const std::vector<double>& factors, std::size_t runs, std::uint64_t seed,
                                       unsigned threads) {
    std::vector<BracketRow> rows;
    std::uint64_t base = 0;
    for (std::size_t n : ns) {
        HostGraph host = HostGraph::complete(n);
        for (double fac : factors) {
            double t = fac * t_hat_c;
            auto fr = parallel_map<double>(runs, threads, [&](std::size_t j) {
                auto s = simulate_replica(host, dist, StopRule::until_time(t), seed, Stream::bracket, base + j);
                return static_cast<double>(s.dsu.largest()) / static_cast<double>(n);
            });
            base += runs;
            rows.push_back({n, fac, t, mean_stderr(fr)});
        }
    }
    return rows;
}

inline std::vector<std::string> critical_header() {
    return {"dist", "t_hat_c", "t_c", "theta", "delta", "I", "J", "asymptotic_ref", "ratio", "flags", "mu"};
}

inline std::vector<std::string> critical_row(const CriticalTimeReport& r) {
    return {r.dist,         fmt_num(r.t_hat_c), fmt_num(r.t_c),   fmt_num(r.theta),
            fmt_num(r.delta), fmt_num(r.I),     fmt_num(r.J),     fmt_num(r.asymptotic_ref),
            fmt_num(r.ratio), r.flags(),        fmt_num(r.mu_at_tc)};
}

inline int cmd_critical(const ExperimentConfig& cfg, std::ostream& log) {
    std::vector<std::string> specs = cfg.dists.empty() ? std::vector<std::string>{cfg.dist} : cfg.dists;
    std::filesystem::path out(cfg.out);
    unsigned threads = resolve_threads(cfg.threads);
    CsvWriter w(out / "critical.csv", cfg.metadata(), critical_header());
    std::unique_ptr<CsvWriter> bw;
    if (cfg.bracket)
        bw = std::make_unique<CsvWriter>(out / "bracket.csv", cfg.metadata(),
                                         std::vector<std::string>{"dist", "n", "factor", "t", "mean_largest_frac", "stderr"});
    for (const auto& spec : specs) {
        auto dist = DegreeDistribution::parse(spec);
        LambdaSolution sol = solve_for(dist, cfg.abs_tol);
        auto rep = critical_time(sol);
        if (cfg.grid > 0) rep.mu_at_tc = principal_eigenvalue(build_grid(sol, rep.t_hat_c, cfg.grid)).mu;
        w.row(critical_row(rep));
        log << spec << ": t_hat_c=" << fmt_num(rep.t_hat_c) << " t_c=" << fmt_num(rep.t_c) << " ratio=" << fmt_num(rep.ratio)
            << " mu=" << fmt_num(rep.mu_at_tc) << " flags=" << rep.flags() << '\n';
        if (bw) {
            for (const auto& b : bracket(dist, rep.t_hat_c, cfg.bracket_n, {0.9, 1.1}, cfg.bracket_runs, cfg.seed, threads)) {
                bw->row({rep.dist, std::to_string(b.n), fmt_num(b.factor), fmt_num(b.t), fmt_num(b.largest_frac.mean),
                         fmt_num(b.largest_frac.stderr_)});
                log << "  n=" << b.n << " factor=" << b.factor << " largest_frac=" << fmt_num(b.largest_frac.mean) << '\n';
            }
        }
    }
    return 0;
}

inline int cmd_spectral(const ExperimentConfig& cfg, std::ostream& log) {
    auto dist = DegreeDistribution::parse(cfg.dist);
    LambdaSolution sol = solve_for(dist, cfg.abs_tol);
    std::vector<double> ts = cfg.t_hats.empty() ? std::vector<double>{cfg.t} : cfg.t_hats;
    CsvWriter w(std::filesystem::path(cfg.out) / "spectral.csv", cfg.metadata(), {"t_hat", "mu", "iters", "residual"});
    for (double th : ts) {
        auto e = principal_eigenvalue(build_grid(sol, th, cfg.grid));
        w.row({fmt_num(th), fmt_num(e.mu), std::to_string(e.iters), fmt_num(e.residual)});
        log << "t_hat=" << fmt_num(th) << " mu=" << fmt_num(e.mu) << '\n';
    }
    return 0;
}

}  // namespace rdcp
