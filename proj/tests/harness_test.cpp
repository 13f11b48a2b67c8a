#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "corrline/parallel.hpp"
#include "corrline/rng.hpp"
#include "corrline/stats.hpp"

namespace rng = corrline::rng;
namespace par = corrline::par;
using corrline::stats::Frequency;
using corrline::stats::KahanSum;
using corrline::stats::Welford;

TEST(RngStream, DerivationIsDeterministic) {
    rng::Stream a = rng::derive_stream(42, 7);
    rng::Stream b = rng::derive_stream(42, 7);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngStream, DifferentSeedsAndIndicesDiffer) {
    EXPECT_NE(rng::derive_stream(0, 0).next_u64(), rng::derive_stream(1, 0).next_u64());
    EXPECT_NE(rng::derive_stream(0, 0).next_u64(), rng::derive_stream(0, 1).next_u64());
}

TEST(RngStream, NeighboringStreamsUncorrelated) {
    const int n = 1000;
    rng::Stream a = rng::derive_stream(9, 0);
    rng::Stream b = rng::derive_stream(9, 1);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = a.uniform();
        ys[i] = b.uniform();
    }
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    EXPECT_LT(std::abs(sxy / std::sqrt(sxx * syy)), 0.05);
}

TEST(RngStream, UniformRangeAndBernoulli) {
    rng::Stream stream(3);
    Frequency heads;
    for (int i = 0; i < 20000; ++i) {
        const double u = stream.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        heads.add(stream.bernoulli(0.3));
    }
    EXPECT_NEAR(heads.rate(), 0.3, 4.0 * heads.std_error());
}

TEST(RngStream, NormalMoments) {
    rng::Stream stream(5);
    Welford stats;
    for (int i = 0; i < 200000; ++i) stats.add(stream.normal());
    EXPECT_NEAR(stats.mean(), 0.0, 4.0 * stats.std_error());
    EXPECT_NEAR(stats.variance(), 1.0, 0.02);
}

TEST(Kahan, CompensatesLongSums) {
    KahanSum sum;
    for (int i = 0; i < 10'000'000; ++i) sum += 0.1;
    EXPECT_NEAR(sum.value(), 1e6, 1e-7);
}

TEST(Welford, MatchesDirectComputation) {
    const std::vector<double> xs{1.0, 2.0, 2.5, -3.0, 0.5, 10.0};
    Welford w;
    for (double x : xs) w.add(x);
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    EXPECT_NEAR(w.mean(), mean, 1e-12);
    EXPECT_NEAR(w.variance(), ss / (xs.size() - 1), 1e-12);
}

TEST(Welford, MergeEqualsSequential) {
    rng::Stream stream(11);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = stream.normal();
    Welford all;
    for (double x : xs) all.add(x);
    Welford left, right;
    for (int i = 0; i < 400; ++i) left.add(xs[i]);
    for (int i = 400; i < 1000; ++i) right.add(xs[i]);
    left.merge(right);
    EXPECT_EQ(left.count(), all.count());
    EXPECT_NEAR(left.mean(), all.mean(), 1e-13);
    EXPECT_NEAR(left.variance(), all.variance(), 1e-12);
}

namespace {

struct RunOutcome {
    double mean;
    double m2_proxy;
    std::vector<double> first_records;
    std::vector<std::uint64_t> chunk_order;
};

RunOutcome run_workload(unsigned parallelism) {
    RunOutcome outcome;
    Welford agg;
    par::run_trials<double>(
        50'000, parallelism, 1234,
        [](std::uint64_t trial, rng::Stream& stream) {
            double acc = 0.0;
            for (int i = 0; i < 10; ++i) acc += stream.uniform();
            return acc + static_cast<double>(trial % 7);
        },
        [&](std::uint64_t chunk_index, const std::vector<double>& chunk) {
            outcome.chunk_order.push_back(chunk_index);
            for (double value : chunk) {
                agg.add(value);
                if (outcome.first_records.size() < 10) outcome.first_records.push_back(value);
            }
        });
    outcome.mean = agg.mean();
    outcome.m2_proxy = agg.variance();
    return outcome;
}

}  // namespace

TEST(RunTrials, BitIdenticalAcrossParallelism) {
    const RunOutcome serial = run_workload(1);
    const RunOutcome parallel = run_workload(8);
    EXPECT_EQ(serial.mean, parallel.mean);          // bitwise, not approximate
    EXPECT_EQ(serial.m2_proxy, parallel.m2_proxy);  // bitwise
    EXPECT_EQ(serial.first_records, parallel.first_records);
}

TEST(RunTrials, ChunksArriveInOrder) {
    const RunOutcome outcome = run_workload(8);
    for (std::size_t i = 0; i < outcome.chunk_order.size(); ++i)
        EXPECT_EQ(outcome.chunk_order[i], i);
}

TEST(RunTrials, PropagatesWorkerExceptions) {
    EXPECT_THROW(
        par::run_trials<int>(
            10'000, 4, 1,
            [](std::uint64_t trial, rng::Stream&) {
                if (trial == 7777) throw std::runtime_error("boom");
                return 0;
            },
            [](std::uint64_t, const std::vector<int>&) {}),
        std::runtime_error);
}

TEST(RunTrials, HandlesZeroAndTinyCounts) {
    int sink_calls = 0;
    par::run_trials<int>(
        0, 4, 1, [](std::uint64_t, rng::Stream&) { return 1; },
        [&](std::uint64_t, const std::vector<int>& chunk) { sink_calls += chunk.size(); });
    EXPECT_EQ(sink_calls, 0);
    par::run_trials<int>(
        3, 4, 1, [](std::uint64_t, rng::Stream&) { return 1; },
        [&](std::uint64_t, const std::vector<int>& chunk) { sink_calls += chunk.size(); });
    EXPECT_EQ(sink_calls, 3);
}
