#include <gtest/gtest.h>

#include "faasplan/capacity/memory.hpp"
#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"

using namespace faasplan;
using namespace faasplan::capacity;

namespace {

std::vector<FunctionProfile> profiles(const std::vector<double>& on, const std::vector<double>& off) {
    std::vector<FunctionProfile> out(on.size());
    for (std::size_t i = 0; i < on.size(); ++i) {
        out[i].theta_on = on[i];
        out[i].theta_off = off[i];
    }
    return out;
}

}  // namespace

TEST(AverageMemory, AllIdleLimit) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{0.9, 0.5}, rho{0.0, 0.0};
    EXPECT_NEAR(average_memory(h, rho, p), 0.9 * 0.2 + 0.5 * 0.4, 1e-15);
}

TEST(AverageMemory, SaturatedLimit) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{1.0, 1.0}, rho{1.0, 1.0};
    EXPECT_NEAR(average_memory(h, rho, p), 3.0, 1e-15);
}

TEST(AverageMemory, HandEvaluation) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{0.9, 0.5}, rho{0.2, 0.1};
    EXPECT_NEAR(average_memory(h, rho, p), 0.604, 1e-12);
}

TEST(MaxMemory, MarkovHeadroom) {
    const auto p = profiles({1.0}, {0.2});
    const std::vector<double> h{1.0}, rho{0.3};
    EXPECT_DOUBLE_EQ(max_memory(h, rho, p, 0.05).kappa, 20.0);
    EXPECT_DOUBLE_EQ(max_memory(h, rho, p, 0.1).kappa, 10.0);
    EXPECT_THROW(max_memory(h, rho, p, 0.0), InvalidArgument);
    EXPECT_THROW(max_memory(h, rho, p, 1.5), InvalidArgument);
}

TEST(MaxMemory, NoExecutionMeansNoHeadroom) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{0.9, 0.5}, rho{0.0, 0.0};
    EXPECT_NEAR(max_memory(h, rho, p, 0.05).m_max, average_memory(h, rho, p), 1e-15);
}

TEST(MaxMemory, NeverBelowAverage) {
    auto rng = make_stream(21, StreamId::experiment);
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + t % 17;
        std::vector<FunctionProfile> p(n);
        std::vector<double> h(n), rho(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i].theta_on = sample_uniform(0.128, 3.008, rng);
            p[i].theta_off = p[i].theta_on * sample_uniform(0.0, 1.0, rng);
            h[i] = sample_uniform(0.0, 1.0, rng);
            rho[i] = sample_uniform(0.0, 1.0, rng);
        }
        const double eps = sample_uniform(0.01, 0.99, rng);
        EXPECT_GE(max_memory(h, rho, p, eps).m_max, average_memory(h, rho, p) - 1e-12);
    }
}

TEST(SuggestCapacity, RoundsUpToModule) {
    const auto p = profiles({250.0, 250.0}, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(suggest_capacity(30.1, p, 8.0), 32.0);
}

TEST(SuggestCapacity, ExecutionFootprintCaps) {
    const auto p = profiles({20.0, 20.0}, {0.0, 0.0});
    EXPECT_DOUBLE_EQ(suggest_capacity(1000.0, p, 8.0), 40.0);
}

TEST(SuggestCapacity, EmptyPlatform) {
    const auto p = profiles({1.0}, {0.0});
    EXPECT_DOUBLE_EQ(suggest_capacity(0.0, p, 8.0), 0.0);
}

TEST(Estimate, FieldsConsistent) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{0.9, 0.5}, rho{0.2, 0.1};
    const auto e = estimate_memory(h, rho, p, 0.05, 8.0);
    EXPECT_NEAR(e.m_avg, 0.604, 1e-12);
    EXPECT_NEAR(e.e_u, 0.9 * 0.2 * 1.0 + 0.5 * 0.1 * 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(e.kappa, 20.0);
    EXPECT_DOUBLE_EQ(e.upper_bound_gb, 3.0);
    EXPECT_DOUBLE_EQ(e.capacity_gb, 8.0);
}

TEST(Epsilon, DefaultsByRate) {
    EXPECT_DOUBLE_EQ(default_epsilon(0.2), 0.05);
    EXPECT_DOUBLE_EQ(default_epsilon(0.5), 0.05);
    EXPECT_DOUBLE_EQ(default_epsilon(0.8), 0.1);
}

TEST(ResidentMemory, HitWeightedFootprint) {
    const auto p = profiles({1.0, 2.0}, {0.2, 0.4});
    const std::vector<double> h{0.8, 0.8};
    EXPECT_NEAR(resident_memory(h, p), 2.4, 1e-15);
}
