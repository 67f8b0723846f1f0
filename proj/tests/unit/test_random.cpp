#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "faasplan/core/errors.hpp"
#include "faasplan/core/random.hpp"
#include "faasplan/core/types.hpp"

using namespace faasplan;

TEST(Zipf, SingleFunctionGetsEverything) {
    const auto p = zipf_popularities(1, 1.0);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_DOUBLE_EQ(p[0], 1.0);
}

TEST(Zipf, ZeroExponentIsUniform) {
    for (double v : zipf_popularities(4, 0.0)) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Zipf, ThreeFunctionsHarmonicWeights) {
    const auto p = zipf_popularities(3, 1.0);
    EXPECT_NEAR(p[0], 6.0 / 11.0, 1e-15);
    EXPECT_NEAR(p[1], 3.0 / 11.0, 1e-15);
    EXPECT_NEAR(p[2], 2.0 / 11.0, 1e-15);
}

TEST(Zipf, NormalisedAndNonIncreasing) {
    for (std::size_t n : {1u, 2u, 7u, 64u, 513u, 1024u})
        for (double eta : {0.0, 0.3, 0.6, 1.0, 1.4, 2.0}) {
            const auto p = zipf_popularities(n, eta);
            EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12) << n << " " << eta;
            for (std::size_t i = 1; i < n; ++i) EXPECT_LE(p[i], p[i - 1]);
        }
}

TEST(Zipf, RejectsBadArguments) {
    EXPECT_THROW(zipf_popularities(0, 1.0), InvalidArgument);
    EXPECT_THROW(zipf_popularities(3, -0.5), InvalidArgument);
}

TEST(Exponential, InverseTransformIdentity) {
    EXPECT_NEAR(exponential_from_uniform(1.0, 1.0 - std::exp(-1.0)), 1.0, 1e-14);
}

TEST(Exponential, SampleMeanMatchesRate) {
    auto rng = make_stream(42, StreamId::service);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += sample_exponential(2.0, rng);
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Exponential, ZeroRateRejected) {
    auto rng = make_stream(1, StreamId::service);
    EXPECT_THROW(sample_exponential(0.0, rng), InvalidArgument);
    EXPECT_THROW(exponential_from_uniform(0.0, 0.5), InvalidArgument);
}

TEST(LognormalFraction, DegenerateSigmaCollapsesToMean) {
    auto rng = make_stream(3, StreamId::idle_fraction);
    for (int i = 0; i < 100; ++i) EXPECT_NEAR(sample_lognormal_fraction(0.2, 1e-12, rng), 0.2, 1e-9);
}

TEST(LognormalFraction, RawMeanMatchesRequestedMean) {
    auto rng = make_stream(5, StreamId::idle_fraction);
    const double loc = lognormal_location_for_mean(0.2, 0.5);
    const int n = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += sample_lognormal(loc, 0.5, rng);
    EXPECT_NEAR(sum / n, 0.2, 0.005);
}

TEST(LognormalFraction, SamplesStayInUnitInterval) {
    auto rng = make_stream(6, StreamId::idle_fraction);
    for (int i = 0; i < 100000; ++i) {
        const double f = sample_lognormal_fraction(0.2, 0.5, rng);
        EXPECT_GT(f, 0.0);
        EXPECT_LE(f, 1.0);
    }
}

TEST(LognormalFraction, MeanAboveOneRejected) {
    auto rng = make_stream(7, StreamId::idle_fraction);
    EXPECT_THROW(sample_lognormal_fraction(1.5, 0.5, rng), InvalidArgument);
}

TEST(Streams, DeterministicAndSeparated) {
    auto a = make_stream(9, StreamId::arrivals);
    auto b = make_stream(9, StreamId::arrivals);
    auto c = make_stream(9, StreamId::service);
    auto d = make_stream(9, StreamId::arrivals, 1);
    const auto va = a(), vb = b(), vc = c(), vd = d();
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
    EXPECT_NE(va, vd);
}

TEST(Workload, ZipfWorkloadValidates) {
    std::vector<FunctionProfile> fs(5);
    const auto wl = make_zipf_workload(0.5, 1.0, fs);
    EXPECT_NO_THROW(wl.validate());
    EXPECT_NEAR(wl.arrival_rate(0), 0.5 * zipf_popularities(5, 1.0)[0], 1e-15);
}

TEST(Workload, BadPopularitySumRejected) {
    WorkloadSpec wl;
    wl.functions.resize(2);
    wl.functions[0].popularity = 0.5;
    wl.functions[1].popularity = 0.4;
    EXPECT_THROW(wl.validate(), InvalidArgument);
}
