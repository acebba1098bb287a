#include <gtest/gtest.h>

#include <map>

#include <boost/math/distributions/chi_squared.hpp>

#include "rdcp/acceptance.hpp"
#include "rdcp/rdcp_sim.hpp"

using namespace rdcp;

namespace {

std::uint32_t edge_mask(const RdcpState& s, std::size_t n) {
    std::uint32_t m = 0;
    for (const auto& e : s.edges_added) {
        Vertex u = std::min(e.u, e.v), v = std::max(e.u, e.v);
        std::uint32_t bit = 0;
        for (Vertex a = 0; a < n; ++a)
            for (Vertex b = a + 1; b < n; ++b, ++bit)
                if (a == u && b == v) m |= 1u << bit;
    }
    return m;
}

/// p-value of the chi-squared homogeneity test over the pooled categories.
double homogeneity_p(const std::vector<std::map<std::uint32_t, double>>& tables) {
    std::map<std::uint32_t, double> pooled;
    std::vector<double> totals;
    double grand = 0.0;
    for (const auto& t : tables) {
        double tot = 0.0;
        for (auto [k, c] : t) {
            pooled[k] += c;
            tot += c;
        }
        totals.push_back(tot);
        grand += tot;
    }
    double stat = 0.0;
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (auto [k, c] : pooled) {
            double e = c * totals[i] / grand;
            auto it = tables[i].find(k);
            double o = it == tables[i].end() ? 0.0 : it->second;
            stat += (o - e) * (o - e) / e;
        }
    double dof = static_cast<double>((pooled.size() - 1) * (tables.size() - 1));
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), stat));
}

}  // namespace

TEST(Simulation, TriangleSaturates) {
    auto host = HostGraph::complete(3);
    auto rng = make_rng(1, 0);
    auto s = simulate(host, {2, 2, 2}, StopRule::until_final(), rng);
    EXPECT_EQ(s.edges_added.size(), 3u);
    EXPECT_EQ(s.unsaturated, 0u);
}

TEST(Simulation, PointMassConstraints) {
    auto rng = make_rng(2, 0);
    auto c = assign_constraints(HostGraph::complete(5), DegreeDistribution::parse("2:1"), rng);
    EXPECT_EQ(c, std::vector<int>(5, 2));
}

TEST(Simulation, MixedConstraintFrequency) {
    auto rng = make_rng(3, 0);
    auto c = assign_constraints(HostGraph::complete(100000), DegreeDistribution::parse("2:0.5,4:0.5"), rng);
    double twos = 0;
    for (int x : c) twos += x == 2;
    EXPECT_NEAR(twos / 1e5, 0.5, 0.005);
}

TEST(Simulation, RejectsConstraintBelowTwo) {
    auto rng = make_rng(4, 0);
    EXPECT_THROW(simulate(HostGraph::complete(4), {1, 1, 1, 1}, StopRule::until_final(), rng), std::invalid_argument);
}

TEST(Simulation, ComponentStats) {
    RdcpState s(std::vector<int>(10, 2));
    auto a = component_stats(s);
    EXPECT_EQ(a.largest, 1u);
    EXPECT_EQ(a.susceptibility, 1.0);
    EXPECT_EQ(a.count, 10u);
    s.add_edge(3, 7, 0.5);
    EXPECT_DOUBLE_EQ(component_stats(s).susceptibility, 1.2);
}

TEST(Simulation, FinalStatesAreMaximal) {
    auto dist = DegreeDistribution::parse("2:0.3,3:0.7");
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto rng = make_rng(seed, 9);
        auto host = HostGraph::random_regular(200, 10, rng);
        auto s = simulate(host, assign_constraints(host, dist, rng), StopRule::until_final(), rng);
        EXPECT_TRUE(is_maximal(host, s));
        for (Vertex v = 0; v < 200; ++v) EXPECT_LE(s.degrees[v], s.constraints[v]);
    }
}

TEST(Simulation, StopRulesShareOnePath) {
    auto rng = make_rng(5, 0);
    auto host = HostGraph::complete(60);
    std::vector<int> c(60, 3);
    auto times = draw_activation_times(host, rng);
    auto full = simulate_with_times(host, c, times, StopRule::until_final());
    auto by_steps = simulate_with_times(host, c, times, StopRule::until_steps(40));
    ASSERT_EQ(by_steps.edges_added.size(), 40u);
    for (std::size_t i = 0; i < 40; ++i) {
        EXPECT_EQ(by_steps.edges_added[i].u, full.edges_added[i].u);
        EXPECT_EQ(by_steps.edges_added[i].v, full.edges_added[i].v);
    }
    double t = full.edges_added[30].time;
    auto by_time = simulate_with_times(host, c, times, StopRule::until_time(t));
    EXPECT_EQ(by_time.edges_added.size(), 31u);
}

TEST(Simulation, LazyMaterializedAndDiscreteAgreeInLaw) {
    const std::size_t n = 5, reps = 20000;
    std::vector<int> c{2, 2, 3, 2, 3};
    auto lazy_host = HostGraph::complete(n, 1);
    auto host = HostGraph::complete(n);
    ASSERT_TRUE(lazy_host.is_implicit());
    ASSERT_FALSE(host.is_implicit());
    std::vector<std::map<std::uint32_t, double>> tables(3);
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = make_rng(77, r);
        tables[0][edge_mask(simulate(lazy_host, c, StopRule::until_final(), rng), n)] += 1;
        tables[1][edge_mask(simulate(host, c, StopRule::until_final(), rng), n)] += 1;
        tables[2][edge_mask(simulate_discrete_oracle(host, c, 100, rng), n)] += 1;
    }
    EXPECT_GT(tables[0].size(), 5u);
    EXPECT_GT(homogeneity_p(tables), 1e-3);
}

TEST(Simulation, LazyBipartiteAgreesInLaw) {
    const std::size_t reps = 20000;
    std::vector<int> c{2, 3, 2, 2, 2, 3};
    auto lazy_host = HostGraph::complete_bipartite(3, 1);
    auto host = HostGraph::complete_bipartite(3);
    ASSERT_TRUE(lazy_host.is_implicit());
    std::vector<std::map<std::uint32_t, double>> tables(2);
    for (std::size_t r = 0; r < reps; ++r) {
        auto rng = make_rng(78, r);
        auto a = simulate(lazy_host, c, StopRule::until_steps(3), rng);
        auto b = simulate(host, c, StopRule::until_steps(3), rng);
        for (const auto& e : a.edges_added) ASSERT_NE(e.u < 3, e.v < 3);
        tables[0][edge_mask(a, 6)] += 1;
        tables[1][edge_mask(b, 6)] += 1;
    }
    EXPECT_GT(homogeneity_p(tables), 1e-3);
}

TEST(Simulation, LazyTimeScale) {
    // Edge arrivals on K_n form a Poisson stream of rate |E| / r_n = n / 2.
    auto host = HostGraph::complete(4000);
    auto rng = make_rng(8, 0);
    std::vector<int> c(4000, 1000);
    auto s = simulate(host, c, StopRule::until_time(0.5), rng);
    EXPECT_NEAR(static_cast<double>(s.steps), 1000.0, 5 * std::sqrt(1000.0));
}

TEST(Neighborhood, Basics) {
    RdcpState empty(std::vector<int>(10, 2));
    EXPECT_EQ(neighborhood(empty, 3, 0), single_vertex_code());
    EXPECT_EQ(neighborhood(empty, 3, 2), single_vertex_code());

    auto rng = make_rng(9, 0);
    auto tri = simulate(HostGraph::complete(3), {2, 2, 2}, StopRule::until_final(), rng);
    RootedGraph cherry{3, {{0, 1}, {0, 2}}};
    for (Vertex v = 0; v < 3; ++v) {
        EXPECT_EQ(neighborhood(tri, v, 0), single_vertex_code());
        EXPECT_EQ(neighborhood(tri, v, 1), canonical_code(cherry));
        auto code2 = neighborhood(tri, v, 2);
        EXPECT_EQ(code2.front(), 'G');
        EXPECT_EQ(code2, neighborhood(tri, 0, 2));
    }
}

TEST(Exploration, MatchesDirectSimulation) {
    auto c = acceptance::exploration_oracle(2024);
    EXPECT_TRUE(c.metrics_pass());
}
