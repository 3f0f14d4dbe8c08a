#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlcast/allocate.hpp"
#include "nlcast/chunks.hpp"
#include "nlcast/errors.hpp"
#include "oracle.hpp"

using nlcast::AllocationPlan;
using nlcast::ChunkStats;

namespace {

ChunkStats stats_from_sd(double sd1, double sd2) {
    ChunkStats s;
    s.var1 = sd1 * sd1;
    s.var2 = sd2 * sd2;
    s.var0 = s.var1; // placeholder; only var1/var2 drive allocation
    return s;
}

std::vector<ChunkStats> random_stats(std::mt19937_64& g, std::size_t count) {
    std::uniform_real_distribution<double> u(0.05, 9.0);
    std::vector<ChunkStats> stats(count);
    for (auto& s : stats) {
        s.var0 = u(g);
        s.var1 = u(g);
        s.var2 = u(g);
    }
    return stats;
}

} // namespace

TEST(AllocateNonlinear, TwoChunkClosedForm) {
    const std::vector<ChunkStats> stats{stats_from_sd(2.0, 1.0), stats_from_sd(1.0, 1.0)};
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, 10.0, 1.2);
    ASSERT_EQ(plan.scale.size(), 2u);
    EXPECT_NEAR(plan.scale[0], 1.290994, 1e-6);
    EXPECT_NEAR(plan.scale[1], 1.825742, 1e-6);
    EXPECT_LE(oracle::rel_err(oracle::alloc_power(stats, plan.scale), 10.0), 1e-9);
}

TEST(AllocateNonlinear, TwoChunkGridSearchAgrees) {
    // Scan the feasible surface directly: split the power budget between
    // the two chunks and find the split minimizing the distortion proxy.
    const std::vector<ChunkStats> stats{stats_from_sd(2.0, 1.0), stats_from_sd(1.0, 1.0)};
    const double p = 10.0, a = 1.2;
    double best_b0 = 0.0, best_b1 = 0.0, best_j = 1e300;
    for (int k = 1; k < 100000; ++k) {
        const double share = static_cast<double>(k) / 100000.0;
        const double b0 = std::sqrt(share * p / stats[0].var1);
        const double b1 = std::sqrt((1.0 - share) * p / stats[1].var1);
        const double j = oracle::alloc_objective(stats, {b0, b1}, a);
        if (j < best_j) {
            best_j = j;
            best_b0 = b0;
            best_b1 = b1;
        }
    }
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, p, a);
    EXPECT_NEAR(plan.scale[0], best_b0, 1e-3);
    EXPECT_NEAR(plan.scale[1], best_b1, 1e-3);
}

TEST(AllocateNonlinear, SingleChunkForcedByConstraint) {
    const std::vector<ChunkStats> stats{stats_from_sd(1.0, 0.7)};
    EXPECT_NEAR(nlcast::allocate_nonlinear(stats, 4.0, 1.1).scale[0], 2.0, 1e-12);
}

TEST(AllocateNonlinear, LagrangeMultiplierRecorded) {
    const std::vector<ChunkStats> stats{stats_from_sd(2.0, 1.5), stats_from_sd(0.5, 3.0)};
    const double p = 7.0;
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, p, 1.3);
    const double cross = 2.0 * 1.5 + 0.5 * 3.0;
    EXPECT_LE(oracle::rel_err(plan.alpha, (cross / p) * (cross / p)), 1e-12);
}

TEST(AllocateNonlinear, NoiseAmplificationMatchesDefinition) {
    std::mt19937_64 g(31);
    const std::vector<ChunkStats> stats = random_stats(g, 4);
    const double a = 1.25;
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, 5.0, a);
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double want = a * a * stats[i].var2 / (plan.scale[i] * plan.scale[i]);
        EXPECT_LE(oracle::rel_err(plan.noise_amplification[i], want), 1e-12);
    }
}

TEST(AllocateNonlinear, BeatsRandomFeasibleAllocations) {
    std::mt19937_64 g(32);
    std::uniform_real_distribution<double> ua(1.0, 1.4);
    std::uniform_int_distribution<int> uc(3, 5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::vector<ChunkStats> stats = random_stats(g, static_cast<std::size_t>(uc(g)));
        const double p = 3.0 + trial;
        const double a = ua(g);
        const AllocationPlan plan = nlcast::allocate_nonlinear(stats, p, a);
        const double j_closed = oracle::alloc_objective(stats, plan.scale, a);
        for (int r = 0; r < 1000; ++r) {
            const auto b = oracle::random_feasible(stats, p, g);
            EXPECT_LE(j_closed, oracle::alloc_objective(stats, b, a) * (1.0 + 1e-9));
        }
    }
}

TEST(AllocateNonlinear, EqualMarginalCostAtTheOptimum) {
    std::mt19937_64 g(33);
    const std::vector<ChunkStats> stats = random_stats(g, 5);
    const double a = 1.17;
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, 11.0, a);
    double first = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double b = plan.scale[i];
        const double marginal = a * a * stats[i].var2 / (b * b * b * b * stats[i].var1);
        if (i == 0)
            first = marginal;
        else
            EXPECT_LE(oracle::rel_err(marginal, first), 1e-9);
    }
}

TEST(AllocateNonlinear, ScaleCovariantInThePowerBudget) {
    std::mt19937_64 g(34);
    const std::vector<ChunkStats> stats = random_stats(g, 4);
    const double c = 3.5;
    const AllocationPlan base = nlcast::allocate_nonlinear(stats, 2.0, 1.2);
    const AllocationPlan scaled = nlcast::allocate_nonlinear(stats, 2.0 * c * c, 1.2);
    for (std::size_t i = 0; i < stats.size(); ++i)
        EXPECT_LE(oracle::rel_err(scaled.scale[i], c * base.scale[i]), 1e-12);
}

TEST(AllocateNonlinear, RejectsBadArguments) {
    const std::vector<ChunkStats> ok{stats_from_sd(1.0, 1.0)};
    EXPECT_THROW(nlcast::allocate_nonlinear(ok, 0.0, 1.2), nlcast::contract_error);
    EXPECT_THROW(nlcast::allocate_nonlinear(ok, -1.0, 1.2), nlcast::contract_error);
    EXPECT_THROW(nlcast::allocate_nonlinear(ok, 1.0, 0.9), nlcast::contract_error);
    EXPECT_THROW(nlcast::allocate_nonlinear({}, 1.0, 1.2), nlcast::contract_error);
}

TEST(AllocateNonlinear, ZeroVarianceChunkIsDegenerate) {
    std::vector<ChunkStats> stats{stats_from_sd(1.0, 1.0), stats_from_sd(0.0, 0.0)};
    EXPECT_THROW(nlcast::allocate_nonlinear(stats, 1.0, 1.2), nlcast::degenerate_chunk_error);
}

TEST(AllocateSoftcast, TwoChunkClosedForm) {
    std::vector<ChunkStats> stats(2);
    stats[0].var0 = 4.0; // standard deviations 2 and 1
    stats[1].var0 = 1.0;
    const AllocationPlan plan = nlcast::allocate_softcast(stats, 3.0);
    EXPECT_NEAR(plan.scale[0], 0.707107, 1e-6);
    EXPECT_NEAR(plan.scale[1], 1.0, 1e-9);
    double power = 0.0;
    for (std::size_t i = 0; i < 2; ++i) power += plan.scale[i] * plan.scale[i] * stats[i].var0;
    EXPECT_LE(oracle::rel_err(power, 3.0), 1e-9);
}

TEST(AllocateSoftcast, EqualVariancesShareThePowerEqually) {
    std::vector<ChunkStats> stats(5);
    for (auto& s : stats) s.var0 = 2.7;
    const double p = 13.0;
    const AllocationPlan plan = nlcast::allocate_softcast(stats, p);
    for (double g : plan.scale) EXPECT_LE(oracle::rel_err(g * g, p / (5.0 * 2.7)), 1e-12);
}

TEST(AllocateSoftcast, BitForBitEqualToNonlinearAtUnitExponent) {
    std::mt19937_64 g(35);
    std::normal_distribution<double> n(0.0, 6.0);
    for (int trial = 0; trial < 25; ++trial) {
        // stats must come from the unit-exponent convention for the
        // equivalence to be exact
        std::vector<ChunkStats> stats;
        for (int i = 0; i < 4; ++i) {
            std::vector<double> vals(64);
            for (double& v : vals) v = n(g);
            stats.push_back(nlcast::compute_stats(vals, 1.0));
        }
        const double p = 1.0 + trial * 0.37;
        const AllocationPlan nl = nlcast::allocate_nonlinear(stats, p, 1.0);
        const AllocationPlan sc = nlcast::allocate_softcast(stats, p);
        EXPECT_EQ(nl.alpha, sc.alpha);
        for (std::size_t i = 0; i < stats.size(); ++i) {
            EXPECT_EQ(nl.scale[i], sc.scale[i]);
            EXPECT_EQ(nl.noise_amplification[i], sc.noise_amplification[i]);
        }
    }
}

TEST(PredictedDistortion, NoiselessChannelPredictsZero) {
    std::mt19937_64 g(36);
    const std::vector<ChunkStats> stats = random_stats(g, 3);
    const AllocationPlan plan = nlcast::allocate_nonlinear(stats, 4.0, 1.2);
    const auto est = nlcast::predicted_distortion(stats, plan, 0.0);
    EXPECT_EQ(est.total, 0.0);
}

TEST(PredictedDistortion, WienerShrinkageValue) {
    ChunkStats s;
    s.var0 = 4.0;
    s.var2 = 1.0;
    s.var1 = 4.0;
    AllocationPlan plan;
    plan.a = 1.0;
    plan.scale = {1.0};
    const auto est = nlcast::predicted_distortion(std::vector<ChunkStats>{s}, plan, 1.0);
    EXPECT_NEAR(est.per_chunk[0], 0.8, 1e-12); // k*var0/(var0+k) with k=1
}

TEST(PredictedDistortion, DecreasesWithMoreChunkPower) {
    ChunkStats s;
    s.var0 = 4.0;
    s.var2 = 2.0;
    s.var1 = 4.0;
    AllocationPlan weak, strong;
    weak.a = strong.a = 1.3;
    weak.scale = {1.0};
    strong.scale = {2.0};
    const double d_weak =
        nlcast::predicted_distortion(std::vector<ChunkStats>{s}, weak, 0.5).total;
    const double d_strong =
        nlcast::predicted_distortion(std::vector<ChunkStats>{s}, strong, 0.5).total;
    EXPECT_LT(d_strong, d_weak);
}
