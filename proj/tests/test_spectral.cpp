#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "rdcp/critical.hpp"
#include "rdcp/spectral.hpp"

using namespace rdcp;

namespace {

const LambdaSolution& p3() {
    static LambdaSolution sol(DegreeDistribution::parse("3:1"));
    return sol;
}

}  // namespace

TEST(Spectral, KernelSymmetricAndNonnegative) {
    auto g = build_grid(p3(), 1.0, 300);
    ASSERT_EQ(g.u.size(), 300u);
    for (std::size_t i = 0; i < g.G; ++i) {
        EXPECT_GT(g.weight[i], 0.0);
        if (i > 0) {
            EXPECT_GT(g.u[i], g.u[i - 1]);
        }
        for (std::size_t j = 0; j < g.G; ++j) {
            EXPECT_EQ(g.kernel(i, j), g.kernel(j, i));
            EXPECT_GE(g.kernel(i, j), 0.0);
        }
    }
}

TEST(Spectral, SmallTruncationVanishes) {
    auto g = build_grid(p3(), 1e-9, 200);
    for (std::size_t i = 0; i < g.G; ++i)
        for (std::size_t j = 0; j < g.G; ++j)
            ASSERT_LE(g.kernel(i, j), 1e-9 * g.e_over_l[i] * g.e_over_l[j] * (1 + 1e-12));
    EXPECT_LT(principal_eigenvalue(g).mu, 1e-6);
}

TEST(Spectral, PowerIterationMatchesDenseSolver) {
    for (double t_hat : {0.4, 1.0, 2.0}) {
        auto g = build_grid(p3(), t_hat, 250);
        Eigen::MatrixXd M(g.G, g.G);
        for (std::size_t i = 0; i < g.G; ++i)
            for (std::size_t j = 0; j < g.G; ++j)
                M(i, j) = std::sqrt(g.weight[i]) * g.kernel(i, j) * std::sqrt(g.weight[j]);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        double dense = es.eigenvalues().maxCoeff();
        auto e = principal_eigenvalue(g);
        EXPECT_NEAR(e.mu, dense, 1e-10 * dense) << t_hat;
        for (double x : e.v) EXPECT_GT(x, 0.0);
    }
}

TEST(Spectral, RefinementConvergesToOne) {
    auto rep = critical_time(p3());
    double prev = 1.0;
    for (std::size_t G : {500, 1000, 2000}) {
        double gap = std::abs(principal_eigenvalue(build_grid(p3(), rep.t_hat_c, G)).mu - 1.0);
        EXPECT_LT(gap, prev) << G;
        prev = gap;
    }
    EXPECT_LT(prev, 5e-3);
}

TEST(Spectral, EigenfunctionMatchesSturmLiouville) {
    auto rep = critical_time(p3());
    auto g = build_grid(p3(), rep.t_hat_c, 1000);
    auto cc = eigenfunction_crosscheck(g, principal_eigenvalue(g), p3());
    EXPECT_LT(cc.max_rel_dev, 1e-2);
    EXPECT_LT(cc.boundary_residual, 1e-2);
    EXPECT_TRUE(cc.w_increasing);
    EXPECT_TRUE(cc.w_concave);
    EXPECT_GT(cc.nodes_checked, 10u);
}

TEST(Spectral, RejectsTinyGrid) {
    EXPECT_THROW(build_grid(p3(), 1.0, 50), std::invalid_argument);
}
