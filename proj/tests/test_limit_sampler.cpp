#include <gtest/gtest.h>

#include <algorithm>

#include "rdcp/critical.hpp"
#include "rdcp/limit_sampler.hpp"

using namespace rdcp;

namespace {

const LambdaSolution& solution(const std::string& spec) {
    static std::map<std::string, std::unique_ptr<LambdaSolution>> cache;
    auto& p = cache[spec];
    if (!p) p = std::make_unique<LambdaSolution>(DegreeDistribution::parse(spec));
    return *p;
}

/// Kolmogorov-Smirnov distance of the sample from the given CDF.
template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    double n = static_cast<double>(xs.size()), worst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double F = cdf(xs[i]);
        worst = std::max({worst, std::abs(F - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - F)});
    }
    return worst;
}

}  // namespace

TEST(RdeChi, Examples) {
    EXPECT_EQ(rde_chi({1, 2, 3}, 2, {10, 10, 10}), 2.0);
    EXPECT_EQ(rde_chi({1, 2, 3}, 2, {0.5, 10, 10}), 3.0);
    EXPECT_FALSE(rde_chi({1, 2}, 3, {10, 10}).has_value());
    EXPECT_THROW(rde_chi({2, 1}, 2, {10, 10}), std::invalid_argument);
}

TEST(Mtbp, PointMassConstraint) {
    MtbpSampler m(solution("3:1"));
    auto rng = make_rng(1, 0);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(m.sample_root(rng).second, 3);
}

TEST(Mtbp, SmallTypesFavourTwo) {
    MtbpSampler m(solution("2:0.5,3:0.5"));
    auto rng = make_rng(2, 0);
    int twos = 0;
    for (int i = 0; i < 10000; ++i) twos += m.sample_constraint(1e-7, rng) == 2;
    EXPECT_EQ(twos, 10000);
}

TEST(Mtbp, ChildCounts) {
    MtbpSampler m(solution("2:0.5,4:0.5"));
    auto rng = make_rng(3, 0);
    EXPECT_EQ(m.children(0.7, 2, false, rng).size(), 1u);
    EXPECT_EQ(m.children(0.7, 4, false, rng).size(), 3u);
    EXPECT_EQ(m.children(0.7, 4, true, rng).size(), 4u);
}

TEST(Mtbp, PairSupport) {
    MtbpSampler m(solution("3:1"));
    auto rng = make_rng(4, 0);
    for (double t0 : {0.05, 0.7, 3.0}) {
        for (int i = 0; i < 20000; ++i) {
            auto [tau, s] = m.sample_pair(t0, rng);
            ASSERT_GE(tau, 0.0);
            ASSERT_LE(tau, std::min(t0, s));
        }
    }
}

TEST(Mtbp, RootTypeFollowsF) {
    const auto& sol = solution("3:1");
    MtbpSampler m(sol);
    auto rng = make_rng(5, 0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = m.sample_root_type(rng);
    EXPECT_LT(ks_distance(xs, [&](double t) { return 1.0 - sol.lambda_prime(t); }), 0.01);
}

TEST(Mtbp, LastChildTypeFollowsTruncatedF) {
    const auto& sol = solution("2:0.5,4:0.5");
    MtbpSampler m(sol);
    auto rng = make_rng(6, 0);
    const double t0 = 0.8;
    double tail = sol.lambda_prime(t0);
    std::vector<double> xs(100000);
    for (auto& x : xs) {
        x = m.sample_last_child_type(t0, rng);
        ASSERT_GT(x, t0);
    }
    EXPECT_LT(ks_distance(xs, [&](double t) { return (tail - sol.lambda_prime(t)) / tail; }), 0.01);
}

TEST(Mtbp, PairTypeMarginal) {
    // s has density f(s) min(t0, s) / lambda(t0)
    const auto& sol = solution("3:1");
    MtbpSampler m(sol);
    auto rng = make_rng(7, 0);
    const double t0 = 0.9;
    double l0 = sol.lambda(t0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = m.sample_pair(t0, rng).second;
    auto cdf = [&](double s) {
        if (s <= t0) return sol.partial_mean(s) / l0;
        return (sol.partial_mean(t0) + t0 * (sol.lambda_prime(t0) - sol.lambda_prime(s))) / l0;
    };
    EXPECT_LT(ks_distance(xs, cdf), 0.01);
}

TEST(Mtbp, ZeroHorizonIsRootOnly) {
    MtbpSampler m(solution("3:1"));
    auto rng = make_rng(8, 0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(m.component(0.0, rng).size(), 1u);
        EXPECT_EQ(pwit_explore(DegreeDistribution::parse("3:1"), 0.0, 2, rng).size(), 1u);
    }
}

TEST(Mtbp, RootSaturatesEventually) {
    MtbpSampler m(solution("3:1"));
    auto rng = make_rng(9, 0);
    SamplerCaps caps;
    caps.max_depth = 1;
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(m.component(kInf, rng, caps).nodes[0].children.size(), 3u);
}

TEST(Mtbp, TreeInvariants) {
    MtbpSampler m(solution("2:0.3,3:0.4,5:0.3"));
    auto rng = make_rng(10, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        auto tree = m.component(0.9, rng);
        for (std::size_t i = 0; i < tree.size(); ++i) {
            const auto& v = tree.nodes[i];
            int slots = i == 0 ? v.constraint : v.constraint - 1;
            ASSERT_LE(static_cast<int>(v.children.size()), slots);
            for (int c : v.children) {
                const auto& w = tree.nodes[c];
                ASSERT_LT(w.label, 0.9);
                ASSERT_LE(w.label, v.type);
                ASSERT_LE(w.label, w.type);
                ASSERT_EQ(w.depth, v.depth + 1);
            }
        }
    }
}

TEST(Pwit, BallRespectsConstraints) {
    auto dist = DegreeDistribution::parse("2:0.5,3:0.5");
    auto rng = make_rng(11, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        auto tree = pwit_explore(dist, 1.5, 3, rng);
        for (std::size_t i = 0; i < tree.size(); ++i) {
            const auto& v = tree.nodes[i];
            int degree = static_cast<int>(v.children.size()) + (i == 0 ? 0 : 1);
            ASSERT_LE(degree, v.constraint);
            ASSERT_LE(v.depth, 3);
        }
    }
}

TEST(TwoSamplers, SmallCensusAgreement) {
    const auto& sol = solution("2:0.5,4:0.5");
    MtbpSampler m(sol);
    auto rng_a = make_rng(12, 0), rng_b = make_rng(12, 1);
    std::vector<std::string> a, b;
    for (int i = 0; i < 40000; ++i) {
        a.push_back(m.component(1.0, rng_a).ball_code(1));
        b.push_back(pwit_explore(sol.dist(), 1.0, 1, rng_b).ball_code(1));
    }
    EXPECT_LT(tv_distance(make_census(a), make_census(b)), 0.015);
}
