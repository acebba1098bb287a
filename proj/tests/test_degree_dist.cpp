#include <gtest/gtest.h>

#include "rdcp/degree_dist.hpp"
#include "rdcp/rng.hpp"

using rdcp::DegreeDistribution;

TEST(DegreeDist, PointMass) {
    auto d = DegreeDistribution::from_pmf({{3, 1.0}});
    EXPECT_EQ(d.delta_max(), 3);
    EXPECT_EQ(d.p(3), 1.0);
    EXPECT_EQ(d.q(3), 1.0);
    EXPECT_EQ(d.q(4), 0.0);
    EXPECT_EQ(d.mean(), 3.0);
    EXPECT_DOUBLE_EQ(d.inv_factorial_moment(), 1.0 / 6.0);
}

TEST(DegreeDist, NormalizesAndSumsTail) {
    auto d = DegreeDistribution::from_pmf({{2, 1.0}, {4, 1.0}});
    EXPECT_DOUBLE_EQ(d.p(2), 0.5);
    EXPECT_DOUBLE_EQ(d.p(4), 0.5);
    EXPECT_DOUBLE_EQ(d.q(3), 0.5);
    EXPECT_DOUBLE_EQ(d.q(4), 0.5);
    EXPECT_DOUBLE_EQ(d.mean(), 3.0);
    EXPECT_NEAR(d.inv_factorial_moment(), 0.5 / 2 + 0.5 / 24, 1e-15);
}

TEST(DegreeDist, TailDifferencesAreExact) {
    auto d = DegreeDistribution::parse("2:0.1,3:0.25,5:0.3,9:0.35");
    for (int k = 2; k <= d.delta_max(); ++k) EXPECT_EQ(d.q(k) - d.q(k + 1), d.p(k)) << k;
    EXPECT_EQ(d.q(1), 1.0);
    EXPECT_EQ(d.q(d.delta_max() + 1), 0.0);
}

TEST(DegreeDist, EightFactorial) {
    auto d = DegreeDistribution::from_pmf({{8, 1.0}});
    EXPECT_NEAR(d.inv_factorial_moment(), 2.4802e-5, 1e-9);
}

TEST(DegreeDist, RejectsBadInput) {
    EXPECT_THROW(DegreeDistribution::from_pmf({{1, 1.0}}), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::from_pmf({{3, -1.0}}), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::from_pmf({{3, 0.0}}), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::from_pmf({}), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::parse("3"), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::parse("3:x"), std::invalid_argument);
    EXPECT_THROW(DegreeDistribution::parse("1:1"), std::invalid_argument);
}

TEST(DegreeDist, ParseRoundTrip) {
    auto d = DegreeDistribution::parse(" 2:1 , 4:3 ");
    EXPECT_DOUBLE_EQ(d.p(2), 0.25);
    EXPECT_DOUBLE_EQ(d.p(4), 0.75);
    auto e = DegreeDistribution::parse("2:0.25,4:0.75");
    EXPECT_EQ(d.to_string(), e.to_string());
}

TEST(DegreeDist, SamplePointMass) {
    auto d = DegreeDistribution::from_pmf({{3, 1.0}});
    auto rng = rdcp::make_rng(5, 0);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(d.sample(rng), 3);
}

TEST(DegreeDist, SampleFrequency) {
    auto d = DegreeDistribution::from_pmf({{2, 0.5}, {4, 0.5}});
    auto rng = rdcp::make_rng(11, 0);
    const int n = 1'000'000;
    int twos = 0;
    for (int i = 0; i < n; ++i) twos += d.sample(rng) == 2;
    EXPECT_NEAR(static_cast<double>(twos) / n, 0.5, 0.002);
}
