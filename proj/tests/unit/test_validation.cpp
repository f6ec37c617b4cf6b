#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "tbound/exact_hypergeom.hpp"
#include "tbound/validation.hpp"

using namespace tbound;

TEST(SplitSampler, DeterministicSortedAndValid)
{
    const SplitSampler s(30, 12, 99);
    const auto a = sample_split(s, 5);
    EXPECT_EQ(a, sample_split(s, 5));
    EXPECT_NE(a, sample_split(s, 6));
    ASSERT_EQ(a.size(), 12u);
    for (std::size_t i = 1; i < a.size(); ++i)
        EXPECT_LT(a[i - 1], a[i]);
    EXPECT_GE(a.front(), 0);
    EXPECT_LT(a.back(), 30);
    EXPECT_THROW(SplitSampler(5, 5, 0), DomainError);
    EXPECT_THROW(SplitSampler(5, 0, 0), DomainError);
}

TEST(SplitSampler, MixSeedIsSplitMix64)
{
    // First output of the reference SplitMix64 generator seeded with 0.
    EXPECT_EQ(mix_seed(0, 0), 0xE220A8397B1DCDAFULL);
    EXPECT_NE(mix_seed(1, 0), mix_seed(0, 1));
}

TEST(SplitSampler, SubsetsAreUniform)
{
    // Chi-square over all C(6,3) = 20 subsets; 0.001 critical value, 19 dof.
    const SplitSampler s(6, 3, 2024);
    std::map<std::vector<std::int64_t>, std::int64_t> counts;
    const std::int64_t trials = 100000;
    for (std::int64_t t = 0; t < trials; ++t)
        ++counts[sample_split(s, static_cast<std::uint64_t>(t))];
    ASSERT_EQ(counts.size(), 20u);
    const double expected = trials / 20.0;
    double chi2 = 0.0;
    for (const auto& [subset, c] : counts)
        chi2 += (c - expected) * (c - expected) / expected;
    EXPECT_LT(chi2, 43.82);
}

TEST(SplitSampler, LeaveOneOutComplementIsUniform)
{
    const SplitSampler s(8, 7, 3);
    std::vector<std::int64_t> missing(8, 0);
    for (std::uint64_t t = 0; t < 80000; ++t) {
        const auto split = sample_split(s, t);
        std::int64_t sum = 0;
        for (auto i : split)
            sum += i;
        ++missing[static_cast<std::size_t>(28 - sum)];
    }
    for (auto c : missing)
        EXPECT_NEAR(c, 10000, 3 * std::sqrt(10000 * 7.0 / 8.0) + 1);
}

TEST(McReport, ToleranceAndVerdict)
{
    const auto r = McReport::make("x", 10000, 560, 0.05);
    EXPECT_NEAR(r.tolerance, 3.0 * std::sqrt(0.05 * 0.95 / 10000.0), 1e-15);
    EXPECT_TRUE(r.passed);
    EXPECT_FALSE(McReport::make("x", 10000, 600, 0.05).passed);
    EXPECT_THROW(McReport::make("x", 10, 11, 0.05), DomainError);
    EXPECT_THROW(McReport::make("x", 0, 0, 0.05), DomainError);
}

TEST(Unbiasedness, Examples)
{
    const std::vector<std::int8_t> zeros(9, 0), ones(9, 1), two{1, 1, 0, 0, 0, 0};
    EXPECT_TRUE(check_unbiasedness(zeros, 4).equal);
    EXPECT_EQ(check_unbiasedness(zeros, 4).error_sum, 0);
    const auto all = check_unbiasedness(ones, 4);
    EXPECT_TRUE(all.equal);
    EXPECT_EQ(all.error_sum, all.subsets * 4);
    const auto r = check_unbiasedness(two, 3);
    EXPECT_EQ(r.subsets, 20);
    // Average training error 1/3: 20 subsets of 3 points carry 20 errors.
    EXPECT_EQ(r.error_sum, 20);
    EXPECT_TRUE(r.equal);
    EXPECT_THROW(check_unbiasedness(std::vector<std::int8_t>(26, 0), 3), DomainError);
}

TEST(Unbiasedness, AllVectorsUpToTen)
{
    for (int n = 1; n <= 10; ++n)
        for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
            std::vector<std::int8_t> e(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                e[static_cast<std::size_t>(i)] = (mask >> i) & 1u;
            for (int m = 1; m <= n; ++m)
                ASSERT_TRUE(check_unbiasedness(e, m).equal);
        }
}

TEST(McConcentration, MatchesExactTail)
{
    std::vector<std::int8_t> pop(100, 0);
    for (int i = 0; i < 30; ++i)
        pop[static_cast<std::size_t>(i * 3)] = 1;
    const auto rows = mc_concentration(pop, 50, {0.0, 0.05, 0.1, 0.2}, 100000, 11);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) {
        EXPECT_TRUE(row.agrees) << row.eps << ' ' << row.frequency.empirical << ' ' << row.exact_tail;
        EXPECT_TRUE(row.dominated);
    }
    EXPECT_GT(rows[0].frequency.empirical, 0.0);
    // eps = 0.1 exact tail, straight from the pmf.
    const HypergeomSpec s{50, 50, 30};
    double tail = 0.0;
    for (int r = 20; r <= 30; ++r)
        tail += hypergeom_pmf(r, s);
    EXPECT_NEAR(rows[2].exact_tail, tail, 1e-12);
}

TEST(McConcentration, ConstantPopulationAndDeterminism)
{
    const std::vector<std::int8_t> pop(40, 1);
    for (const auto& row : mc_concentration(pop, 10, {0.01, 0.5}, 2000, 1))
        EXPECT_EQ(row.frequency.violations, 0);
    std::vector<std::int8_t> mixed(40, 0);
    for (int i = 0; i < 13; ++i)
        mixed[static_cast<std::size_t>(i)] = 1;
    const auto a = mc_concentration(mixed, 15, {0.05}, 5000, 8, 1);
    const auto b = mc_concentration(mixed, 15, {0.05}, 5000, 8, 3);
    EXPECT_EQ(a[0].frequency.violations, b[0].frequency.violations);
    EXPECT_THROW(mc_concentration(mixed, 15, {0.05}, 999, 8), DomainError);
}

TEST(BoundValidity, TargetOnlyHypothesisNeverViolates)
{
    auto inst = random_labeling_instance(20, 10, 1, 4);
    inst.hypotheses = {inst.target};
    for (auto s : {ValidityScenario::vapnik_det, ValidityScenario::serfling_det, ValidityScenario::direct_det,
                   ValidityScenario::gibbs_reduction, ValidityScenario::gibbs_direct})
        EXPECT_EQ(mc_bound_validity(s, inst, 0.05, 500, 1).violations, 0) << to_string(s);
}

TEST(BoundValidity, RandomLabelingsMonteCarlo)
{
    const auto inst = random_labeling_instance(40, 20, 16, 7);
    for (auto s : {ValidityScenario::vapnik_det, ValidityScenario::vapnik_det_relative,
                   ValidityScenario::serfling_det, ValidityScenario::direct_det, ValidityScenario::gibbs_reduction,
                   ValidityScenario::gibbs_direct}) {
        const auto r = mc_bound_validity(s, inst, 0.05, 10000, 1);
        EXPECT_EQ(r.trials, 10000);
        EXPECT_TRUE(r.passed) << to_string(s) << ' ' << r.empirical;
    }
}

TEST(BoundValidity, DeterministicAcrossThreadCounts)
{
    const auto inst = random_labeling_instance(30, 12, 8, 2);
    const auto a = mc_bound_validity(ValidityScenario::vapnik_det, inst, 0.1, 3000, 5, 1);
    const auto b = mc_bound_validity(ValidityScenario::vapnik_det, inst, 0.1, 3000, 5, 4);
    EXPECT_EQ(a.violations, b.violations);
    EXPECT_EQ(a.boundary_hits, b.boundary_hits);
}

TEST(BoundValidity, ExhaustiveStrictEventWithinDelta)
{
    // Strict exceedance R_u - R_m > eps*(h) is the event the worst-case tail
    // controls; ties at eps* carry positive mass and are reported separately.
    std::int64_t ties = 0;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto inst = random_labeling_instance(16, 8, 6, seed);
        for (auto s : {ValidityScenario::vapnik_det, ValidityScenario::vapnik_det_relative}) {
            const auto r = exhaustive_bound_validity(s, inst, 0.05);
            EXPECT_EQ(r.trials, 12870);
            EXPECT_LE(r.empirical, 0.05) << to_string(s);
            ties += r.boundary_hits;
        }
        for (auto s : {ValidityScenario::serfling_det, ValidityScenario::direct_det, ValidityScenario::gibbs_direct,
                       ValidityScenario::gibbs_reduction})
            EXPECT_LE(exhaustive_bound_validity(s, inst, 0.05).empirical, 0.05) << to_string(s);
    }
    EXPECT_GT(ties, 0);
}

TEST(BoundValidity, ExhaustiveAgreesWithMonteCarlo)
{
    const auto inst = random_labeling_instance(18, 9, 10, 12);
    for (auto s : {ValidityScenario::vapnik_det, ValidityScenario::serfling_det}) {
        const auto ex = exhaustive_bound_validity(s, inst, 0.2);
        const auto mc = mc_bound_validity(s, inst, 0.2, 20000, 3);
        const double p = ex.empirical;
        EXPECT_NEAR(mc.empirical, p, 3.0 * std::sqrt(p * (1.0 - p) / 20000.0) + 1e-12) << to_string(s);
    }
}

TEST(BoundValidity, ClusteringOnTwoBlobs)
{
    const auto r = mc_bound_validity(ValidityScenario::clustering, two_blob_instance(), 0.05, 2000, 17);
    EXPECT_TRUE(r.passed) << r.empirical;
}

TEST(BoundValidity, RejectsIllFormedInstances)
{
    auto inst = random_labeling_instance(20, 10, 4, 1);
    inst.prior = {0.5, 0.5, 0.5, 0.5};
    EXPECT_THROW(mc_bound_validity(ValidityScenario::serfling_det, inst, 0.05, 10, 1), DomainError);
    EXPECT_THROW(mc_bound_validity(ValidityScenario::clustering, random_labeling_instance(20, 10, 4, 1), 0.05, 10, 1),
                 DomainError);
    EXPECT_THROW(parse_validity_scenario("nope"), DomainError);
    EXPECT_THROW(exhaustive_bound_validity(ValidityScenario::serfling_det, random_labeling_instance(21, 10, 2, 1), 0.05),
                 DomainError);
}
