#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "faasplan/core/errors.hpp"
#include "faasplan/sim/simulator.hpp"
#include "faasplan/ttl/ttl.hpp"

using namespace faasplan;
using namespace faasplan::sim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SimConfig single(double lambda, double mu, double alpha, double idle, double horizon, double warmup) {
    std::vector<FunctionProfile> fs(1);
    fs[0].mu = mu;
    fs[0].alpha = alpha;
    fs[0].theta_on = 1.5;
    fs[0].theta_off = 0.3;
    SimConfig c;
    c.workload = make_zipf_workload(lambda, 0.0, fs);
    c.idle_times = {idle};
    c.cores = 1;
    c.horizon = horizon;
    c.warmup = warmup;
    c.dispatcher_delay = 0.0;
    c.seed = 17;
    return c;
}

SimConfig mixed(std::uint64_t seed) {
    std::vector<FunctionProfile> fs(5);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        fs[i].mu = 1.0 + 0.2 * static_cast<double>(i);
        fs[i].alpha = 0.1 + 0.1 * static_cast<double>(i);
        fs[i].theta_on = 0.5 + static_cast<double>(i);
        fs[i].theta_off = 0.1;
    }
    SimConfig c;
    c.workload = make_zipf_workload(0.8, 1.0, fs);
    c.idle_times = {30.0, 60.0, 10.0, 0.0, kInf};
    c.cores = 2;
    c.horizon = 20000.0;
    c.warmup = 500.0;
    c.seed = seed;
    return c;
}

}  // namespace

TEST(Simulator, AlwaysWarmSingleServerMatchesMM1) {
    const double lambda = 0.5, mu = 1.0;
    const double arrivals = 1e6;
    auto c = single(lambda, mu, 1.0, kInf, 1000.0 + arrivals / lambda, 1000.0);
    const auto r = run_replication(c, 99);
    EXPECT_GT(r.functions[0].arrivals, 0.99 * arrivals);
    EXPECT_NEAR(r.functions[0].mean_response / (1.0 / (mu - lambda)), 1.0, 0.02);
    EXPECT_EQ(r.functions[0].hits, r.functions[0].arrivals);
}

TEST(Simulator, FcfsSingleServerMatchesMM1) {
    auto c = single(0.6, 1.5, 1.0, kInf, 1000.0 + 3e5 / 0.6, 1000.0);
    c.cpu = CpuDiscipline::fcfs;
    const auto r = run_replication(c, 5);
    EXPECT_NEAR(r.functions[0].mean_response / (1.0 / (1.5 - 0.6)), 1.0, 0.03);
}

TEST(Simulator, ZeroIdleTimeIsAlwaysCold) {
    const double lambda = 0.001, mu = 2.0, alpha = 0.5;
    auto c = single(lambda, mu, alpha, 0.0, 100.0 + 2e4 / lambda, 100.0);
    const auto r = run_replication(c, 3);
    EXPECT_LT(r.functions[0].hit_rate(), 0.01);
    // Loading and execution share the core but never overlap for one function.
    EXPECT_NEAR(r.functions[0].mean_response / (1.0 / alpha + 1.0 / mu), 1.0, 0.05);
}

TEST(Simulator, LightTrafficHitRateMatchesTtlFormula) {
    const double lambda = 0.01, t = 100.0;
    auto c = single(lambda, 10.0, 5.0, t, 1000.0 + 1e5 / lambda, 1000.0);
    const auto r = run_replication(c, 11);
    const auto& f = r.functions[0];
    const double h = ttl::hit_rate(lambda, t);
    const double se = std::sqrt(h * (1.0 - h) / static_cast<double>(f.arrivals));
    EXPECT_NEAR(f.hit_rate(), h, 3.0 * se);
}

TEST(Simulator, RequestsAreConserved) {
    const auto r = run_replication(mixed(4), 4);
    EXPECT_EQ(r.arrivals_total, r.completions_total + r.in_flight);
    for (const auto& f : r.functions) {
        EXPECT_LE(f.hits, f.arrivals);
        EXPECT_LE(f.completions, f.arrivals);
        EXPECT_GE(f.min_slack, -1e-9);
    }
}

TEST(Simulator, InfiniteIdleTimeNeverEvictsAfterWarmup) {
    const auto r = run_replication(mixed(8), 8);
    EXPECT_EQ(r.functions[4].hits, r.functions[4].arrivals);
}

TEST(Simulator, DeterministicForSeed) {
    const auto a = run_replication(mixed(1), 123);
    const auto b = run_replication(mixed(1), 123);
    const auto d = run_replication(mixed(1), 124);
    EXPECT_EQ(a.events, b.events);
    EXPECT_EQ(a.max_memory, b.max_memory);
    for (std::size_t i = 0; i < a.functions.size(); ++i)
        EXPECT_EQ(a.functions[i].mean_response, b.functions[i].mean_response);
    EXPECT_NE(a.events, d.events);
}

TEST(Simulator, WorkerCountDoesNotChangeResults) {
    auto c = mixed(6);
    c.replications = 4;
    const auto a = simulate(c, 1);
    const auto b = simulate(c, 3);
    for (std::size_t i = 0; i < c.workload.size(); ++i) {
        EXPECT_EQ(a.response_time[i].mean, b.response_time[i].mean);
        EXPECT_EQ(a.hit_rate[i].sd, b.hit_rate[i].sd);
    }
    EXPECT_EQ(a.max_memory.mean, b.max_memory.mean);
}

TEST(Simulator, TraceMaximumEqualsReportedMaximum) {
    auto c = mixed(2);
    c.record_trace = true;
    const auto r = run_replication(c, 2);
    ASSERT_FALSE(r.trace.empty());
    double mx = 0.0;
    double prev_t = -kInf;
    for (const auto& [t, m] : r.trace) {
        mx = std::max(mx, m);
        EXPECT_GE(t, prev_t);
        prev_t = t;
    }
    EXPECT_EQ(mx, r.max_memory);
    const auto ts = memory_timeseries(c);
    EXPECT_FALSE(ts.empty());
}

TEST(Simulator, NoArrivalsMeansNoMemory) {
    auto c = single(1e-12, 1.0, 1.0, 10.0, 100.0, 0.0);
    c.record_trace = true;
    const auto r = run_replication(c, 1);
    ASSERT_EQ(r.arrivals_total, 0u);
    EXPECT_EQ(r.max_memory, 0.0);
    EXPECT_EQ(r.mean_memory, 0.0);
    for (const auto& [t, m] : r.trace) EXPECT_EQ(m, 0.0);
}

TEST(Simulator, ResidentIdleFunctionHoldsIdleFootprint) {
    // Long stretches between rare, short requests: the function sits idle
    // at theta_off almost all the time.
    auto c2 = single(1e-3, 50.0, 50.0, kInf, 1e6, 5e5);
    c2.record_trace = true;
    const auto r2 = run_replication(c2, 29);
    ASSERT_GT(r2.arrivals_total, 0u);
    EXPECT_NEAR(r2.mean_memory, 0.3, 0.3 * 0.01);
}

TEST(Simulator, HorizonFromSampleTarget) {
    std::vector<FunctionProfile> fs(2);
    const auto wl = make_zipf_workload(1.0, 1.0, fs);  // rates 2/3 and 1/3
    EXPECT_NEAR(horizon_for_samples(wl, 100.0, 1000.0), 100.0 + 3000.0, 1e-9);
    EXPECT_NEAR(horizon_for_samples(wl, 100.0, 1000.0, 500.0), 100.0 + 500.0, 1e-9);
    EXPECT_EQ(default_warmup({10.0, kInf, 400.0}), 800.0);
    EXPECT_EQ(default_warmup({1.0}), 100.0);
}

TEST(Simulator, InvalidConfigRejected) {
    auto c = single(0.5, 1.0, 1.0, 10.0, 100.0, 200.0);
    EXPECT_THROW(run_replication(c, 1), InvalidArgument);
    c.warmup = 0.0;
    c.idle_times = {-1.0};
    EXPECT_THROW(run_replication(c, 1), InvalidArgument);
}
