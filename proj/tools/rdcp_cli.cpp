#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rdcp/acceptance.hpp"
#include "rdcp/experiments.hpp"

namespace {

void add_common(CLI::App* sub, rdcp::ExperimentConfig& cfg) {
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = all cores; RDCP_THREADS overrides)");
    sub->add_option("--out", cfg.out, "output directory");
}

void add_dist(CLI::App* sub, rdcp::ExperimentConfig& cfg) {
    sub->add_option("--dist", cfg.dist, "degree-constraint law, e.g. 3:1 or 2:0.5,4:0.5");
    sub->add_option("--abs-tol", cfg.abs_tol, "ODE absolute tolerance");
}

int run_selftest(const rdcp::ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out);
    auto results = rdcp::run_acceptance(cfg.seed, cfg.out, rdcp::resolve_threads(cfg.threads), std::cout);
    bool ok = true;
    for (const auto& r : results) ok = ok && r.pass();
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random degree constrained process: simulation, local limit and critical times"};
    app.require_subcommand(1);
    rdcp::ExperimentConfig cfg;

    auto* sim = app.add_subcommand("simulate", "run the process on a host graph");
    add_common(sim, cfg);
    add_dist(sim, cfg);
    sim->add_option("--host", cfg.host, "complete:n, bipartite:n, regular:n:r or union:<host>:<host>");
    sim->add_option("--until", cfg.until, "final, time or steps")->check(CLI::IsMember({"final", "time", "steps"}));
    sim->add_option("--t", cfg.t, "stop time for --until time");
    sim->add_option("--steps", cfg.steps, "edge count for --until steps");
    sim->add_option("--runs", cfg.runs, "independent replicas");
    sim->add_flag("--trajectory", cfg.trajectory, "write trajectory.csv for the first replica");

    auto* lc = app.add_subcommand("limit-census", "census of R-balls of the limit component");
    add_common(lc, cfg);
    add_dist(lc, cfg);
    lc->add_option("--t", cfg.t, "time t_hat");
    lc->add_option("--R", cfg.R, "ball radius");
    lc->add_option("--samples", cfg.samples, "number of samples");
    lc->add_option("--sampler", cfg.sampler, "mtbp or pwit")->check(CLI::IsMember({"mtbp", "pwit"}));

    auto* cmp = app.add_subcommand("compare", "finite census against limit census");
    add_common(cmp, cfg);
    add_dist(cmp, cfg);
    cmp->add_option("--host", cfg.host, "host graph spec");
    cmp->add_option("--t", cfg.t, "time t_hat");
    cmp->add_option("--s", cfg.s, "step-indexed mode: k = floor(s n) edges, t_hat = F^-1(2 s)");
    cmp->add_option("--R", cfg.R, "largest radius (0..4)");
    cmp->add_option("--samples", cfg.samples, "limit samples per radius");
    cmp->add_option("--runs", cfg.runs, "finite replicas pooled into the census");
    cmp->add_option("--sampler", cfg.sampler, "mtbp or pwit")->check(CLI::IsMember({"mtbp", "pwit"}));

    auto* crit = app.add_subcommand("critical-time", "critical times, asymptotic ratio and mu");
    crit->alias("critical");
    add_common(crit, cfg);
    add_dist(crit, cfg);
    crit->add_option("--dists", cfg.dists, "several laws, one row each");
    crit->add_option("--grid", cfg.grid, "spectral grid size for the mu column (0 = skip)");
    crit->add_flag("--bracket", cfg.bracket, "Monte Carlo bracket at 0.9 and 1.1 times t_hat_c");
    crit->add_option("--bracket-n", cfg.bracket_n, "host sizes for the bracket");
    crit->add_option("--bracket-runs", cfg.bracket_runs, "replicas per bracket point");

    auto* spec = app.add_subcommand("spectral", "principal eigenvalue of the branching operator");
    add_common(spec, cfg);
    add_dist(spec, cfg);
    spec->add_option("--t", cfg.t, "truncation t_hat");
    spec->add_option("--t-hats", cfg.t_hats, "several truncations");
    spec->add_option("--grid", cfg.grid, "quadrature nodes")->check(CLI::Range(std::size_t{100}, std::size_t{20000}));

    auto* self = app.add_subcommand("selftest", "run the acceptance suite");
    add_common(self, cfg);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            cfg.command = "simulate";
            return rdcp::cmd_simulate(cfg, std::cout);
        }
        if (lc->parsed()) {
            cfg.command = "limit-census";
            return rdcp::cmd_limit_census(cfg, std::cout);
        }
        if (cmp->parsed()) {
            cfg.command = "compare";
            return rdcp::cmd_compare(cfg, std::cout);
        }
        if (crit->parsed()) {
            cfg.command = "critical-time";
            return rdcp::cmd_critical(cfg, std::cout);
        }
        if (spec->parsed()) {
            cfg.command = "spectral";
            return rdcp::cmd_spectral(cfg, std::cout);
        }
        if (self->parsed()) {
            cfg.command = "selftest";
            return run_selftest(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
