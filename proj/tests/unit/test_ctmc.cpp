#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"
#include "faasplan/ctmc/qbd.hpp"

using namespace faasplan;
using namespace faasplan::ctmc;

namespace {

// Dense generator written out state by state, used to check the block layout.
Eigen::MatrixXd dense_generator(double lam, double mu, double alpha, double beta, int k, std::size_t levels) {
    const auto n = static_cast<Eigen::Index>(k + 1 + 2 * levels);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    auto cold = [&](std::size_t j) -> Eigen::Index { return j == 0 ? 0 : k + 1 + 2 * (j - 1); };
    auto warm = [&](std::size_t j) -> Eigen::Index { return k + 1 + 2 * (j - 1) + 1; };
    q(cold(0), cold(1)) += lam;
    for (int p = 1; p <= k; ++p) {
        q(p, p < k ? p + 1 : 0) += k * beta;
        q(p, warm(1)) += lam;
    }
    for (std::size_t j = 1; j <= levels; ++j) {
        q(cold(j), warm(j)) += alpha;
        if (j < levels) {
            q(cold(j), cold(j + 1)) += lam;
            q(warm(j), warm(j + 1)) += lam;
        }
        q(warm(j), j == 1 ? 1 : warm(j - 1)) += mu;
    }
    for (Eigen::Index i = 0; i < n; ++i) q(i, i) = -q.row(i).sum();
    return q;
}

}  // namespace

TEST(QbdChain, SinglePhaseMatchesExponentialIdleChain) {
    const QbdChain c(0.3, 1.0, 0.2, 0.01, 1);
    const auto b00 = c.boundary_local();
    ASSERT_EQ(b00.rows(), 2);
    // (0,0): only arrivals leave; (1,0): arrival plus exponential eviction at beta.
    EXPECT_DOUBLE_EQ(b00(0, 0), -0.3);
    EXPECT_DOUBLE_EQ(b00(1, 0), 0.01);
    EXPECT_DOUBLE_EQ(b00(1, 1), -0.31);
    const Eigen::MatrixXd q(c.truncated_generator(6));
    const auto ref = dense_generator(0.3, 1.0, 0.2, 0.01, 1, 6);
    EXPECT_LT((q - ref).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(QbdChain, TruncatedGeneratorMatchesTransitionRules) {
    const QbdChain c(0.5, 1.0, 0.5, 0.005, 50);
    const Eigen::MatrixXd q(c.truncated_generator(20));
    const auto ref = dense_generator(0.5, 1.0, 0.5, 0.005, 50, 20);
    EXPECT_LT((q - ref).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(QbdChain, GeneratorRowsSumToZero) {
    const QbdChain c(0.5, 1.0, 0.5, 0.005, 50);
    const Eigen::MatrixXd q(c.truncated_generator(30));
    EXPECT_LT(q.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
}

TEST(QbdChain, StateCount) {
    const QbdChain c(0.5, 1.0, 0.5, 0.005, 50);
    for (std::size_t j : {1u, 7u, 100u}) {
        EXPECT_EQ(c.state_count(j), 51 + 2 * j);
        EXPECT_EQ(static_cast<std::size_t>(c.truncated_generator(j).rows()), 51 + 2 * j);
    }
}

TEST(RateMatrix, SolvesQuadraticEquation) {
    const QbdChain c(0.7, 1.3, 0.1, 0.002, 10);
    const auto r = solve_rate_matrix(c).r;
    const Matrix2 res = c.up() + r * c.local() + r * r * c.down();
    EXPECT_LT(res.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(r.minCoeff(), 0.0);
}

TEST(RateMatrix, UpperTriangularClosedForm) {
    // Cold jobs never leave the cold phase by service and warm jobs never go
    // back, so R is upper triangular: R00 = lam/(lam+alpha), R11 = lam/mu.
    const double lam = 0.4, mu = 1.1, alpha = 0.25;
    const QbdChain c(lam, mu, alpha, 0.01, 5);
    const auto r = solve_rate_matrix(c).r;
    EXPECT_NEAR(r(0, 0), lam / (lam + alpha), 1e-12);
    EXPECT_NEAR(r(1, 1), lam / mu, 1e-12);
    EXPECT_NEAR(r(1, 0), 0.0, 1e-14);
    // Off-diagonal from the (0,1) entry of the quadratic equation.
    const double r01 = r(0, 0) * alpha / (lam + mu - mu * (r(0, 0) + r(1, 1)));
    EXPECT_NEAR(r(0, 1), r01, 1e-12);
}

TEST(Stationary, MatchesTruncationOracleForSinglePhase) {
    auto rng = make_stream(11, StreamId::experiment);
    for (int t = 0; t < 10; ++t) {
        const double mu = sample_uniform(1.0, 2.0, rng);
        const double lam = sample_uniform(0.01, 0.9, rng) * mu;
        const QbdChain c(lam, mu, sample_uniform(0.037, 0.5, rng), sample_uniform(0.00083, 0.00556, rng), 1);
        const auto oracle = certified_truncation_oracle(c);
        EXPECT_LT(total_variation(solve_stationary(c), oracle.distribution), 1e-8);
    }
}

TEST(Stationary, ProbabilityConserved) {
    for (int k : {1, 10, 50}) {
        const QbdChain c(0.6, 1.0, 0.1, 0.003, k);
        const auto d = solve_stationary(c);
        EXPECT_NEAR(d.total_mass(), 1.0, 1e-10) << k;
        EXPECT_LT(residual_norm(c, d), 1e-10) << k;
    }
}

TEST(Stationary, HugeIdleTimeNeverCold) {
    FunctionProfile f;
    f.mu = 1.0;
    f.alpha = 0.1;
    const auto d = solve_stationary(build_chain(f, 0.3, 1e9, 50));
    EXPECT_LT(d.cold_mass(), 1e-6);
}

TEST(Stationary, InstantSetupLeavesColdBusyStatesEmpty) {
    const QbdChain c(0.3, 1.0, 1e6, 0.01, 50);
    const auto d = solve_stationary(c);
    double busy_cold = d.tail[0];
    for (const auto& l : d.levels) busy_cold += l[0];
    EXPECT_LT(busy_cold, 1e-6);
}

TEST(Stationary, LightTrafficMatchesTtlMissProbability) {
    FunctionProfile f;
    f.mu = 1.0;
    f.alpha = 0.5;
    const double q = cold_start_probability(f, 0.01, 100.0, 50);
    EXPECT_NEAR(q / std::exp(-1.0), 1.0, 0.05);
}

TEST(ColdStart, DegenerateDistributions) {
    StationaryDistribution warm_only;
    warm_only.boundary = {0.0, 0.5};
    warm_only.levels = {{0.0, 0.5}};
    EXPECT_EQ(cold_start_probability(warm_only), 0.0);
    StationaryDistribution all_cold;
    all_cold.boundary = {1.0, 0.0};
    all_cold.levels = {{0.0, 0.0}};
    EXPECT_EQ(cold_start_probability(all_cold), 1.0);
}

TEST(ColdStart, AgreesWithOracleAtLevel200) {
    const QbdChain c(0.5, 1.0, 0.1, 0.1, 50);
    const double q = cold_start_probability(solve_stationary(c));
    const double ref = cold_start_probability(truncation_oracle(c, 200));
    EXPECT_NEAR(q, ref, 1e-8);
}

TEST(Oracle, CertificateConverges) {
    const QbdChain c(0.8, 1.0, 0.2, 0.004, 10);
    const auto o = certified_truncation_oracle(c, 100);
    EXPECT_LT(o.last_change, 1e-10);
}

TEST(Oracle, UnstableChainRejected) {
    const QbdChain c(1.2, 1.0, 0.2, 0.004, 10);
    EXPECT_THROW(truncation_oracle(c, 100), ModelError);
    EXPECT_THROW(solve_stationary(c), ModelError);
}

TEST(StateCsv, OneRowPerStoredState) {
    const QbdChain c(0.2, 1.0, 0.3, 0.01, 3);
    const auto d = solve_stationary(c);
    std::ostringstream s;
    write_state_csv(s, d);
    std::size_t lines = 0;
    for (char ch : s.str()) lines += ch == '\n';
    EXPECT_GE(lines, 1 + d.boundary.size() + 2 * d.levels.size());
}
