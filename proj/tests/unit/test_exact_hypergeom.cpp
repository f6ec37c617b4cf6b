#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <vector>

#include "tbound/exact_hypergeom.hpp"

using namespace tbound;

namespace {

// Counts of training subsets by number r of contained errors, errors placed
// on points 0..k-1. Plain bitmask enumeration, no combinatorics.
std::vector<std::int64_t> enumerate_counts(int m, int u, int k)
{
    const int n = m + u;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(m + 1), 0);
    const std::uint32_t error_mask = (1u << k) - 1u;
    for (std::uint32_t s = 0; s < (1u << n); ++s) {
        if (__builtin_popcount(s) != m)
            continue;
        ++counts[static_cast<std::size_t>(__builtin_popcount(s & error_mask))];
    }
    return counts;
}

std::int64_t binom(int n, int r)
{
    if (r < 0 || r > n)
        return 0;
    uint128 v = 1;
    for (int i = 1; i <= r; ++i)
        v = v * static_cast<uint128>(n - r + i) / static_cast<uint128>(i);
    return static_cast<std::int64_t>(v);
}

// All attainable thresholds, plus 0.
std::vector<double> thresholds(std::int64_t m, std::int64_t u, DeviationKind kind)
{
    std::set<double> out{0.0};
    for (std::int64_t k = 1; k <= m + u; ++k) {
        const HypergeomSpec s{m, u, k};
        for (auto r = s.r_min(); r <= s.r_max(); ++r) {
            const double d = kind == DeviationKind::absolute ? split_deviation(r, k, m, u)
                                                             : scaled_split_deviation(r, k, m, u);
            if (d >= 0.0)
                out.insert(d);
        }
    }
    return {out.begin(), out.end()};
}

}  // namespace

TEST(LogBinomial, MatchesHighPrecisionValues)
{
    struct Case {
        std::int64_t n, r;
        double expected;
    };
    const Case cases[] = {
        {4, 2, 1.791759469228055},
        {60, 30, 39.311700726011262},
        {1000, 400, 669.35214512554536},
        {100000, 1, 11.512925464970228},
        {1000000, 3, 39.654769204662267},
        {1000000, 500000, 693140.04701306368},
        {1000000, 123457, 373749.98450648405},
    };
    for (const auto& c : cases)
        EXPECT_NEAR(log_binomial(c.n, c.r), c.expected, 1e-10) << c.n << " choose " << c.r;
}

TEST(LogBinomial, EdgesAndErrors)
{
    EXPECT_EQ(log_binomial(17, 0), 0.0);
    EXPECT_EQ(log_binomial(17, 17), 0.0);
    EXPECT_EQ(log_binomial(0, 0), 0.0);
    EXPECT_THROW(log_binomial(3, 4), DomainError);
    EXPECT_THROW(log_binomial(-1, 0), DomainError);
    EXPECT_THROW(log_binomial(3, -1), DomainError);
}

TEST(LogBinomial, AgreesWithIntegerValuesAcrossBranchBoundary)
{
    for (int n = 0; n <= 62; ++n)
        for (int r = 0; r <= n; ++r)
            EXPECT_NEAR(log_binomial(n, r), std::log(static_cast<double>(binom(n, r))), 1e-12);
}

TEST(HypergeomSpec, RejectsInvalid)
{
    EXPECT_THROW((HypergeomSpec{0, 1, 0}), DomainError);
    EXPECT_THROW((HypergeomSpec{1, 0, 0}), DomainError);
    EXPECT_THROW((HypergeomSpec{2, 2, 5}), DomainError);
    EXPECT_THROW((HypergeomSpec{2, 2, -1}), DomainError);
}

TEST(HypergeomPmf, FourPointPopulation)
{
    EXPECT_NEAR(hypergeom_pmf(1, {2, 2, 2}), 2.0 / 3.0, 1e-15);
    EXPECT_EQ(hypergeom_pmf(0, {5, 7, 0}), 1.0);
    EXPECT_EQ(hypergeom_pmf(3, {2, 2, 2}), 0.0);
}

TEST(HypergeomPmf, MatchesEnumerationOfSplits)
{
    for (int n = 2; n <= 14; ++n) {
        for (int m = 1; m < n; ++m) {
            const int u = n - m;
            const auto total = binom(n, m);
            for (int k = 0; k <= n; ++k) {
                const auto counts = enumerate_counts(m, u, k);
                for (int r = 0; r <= m; ++r) {
                    // Counting identity, exact in integers.
                    ASSERT_EQ(counts[static_cast<std::size_t>(r)], binom(k, r) * binom(n - k, m - r));
                    const double expected = static_cast<double>(counts[static_cast<std::size_t>(r)]) /
                                            static_cast<double>(total);
                    EXPECT_NEAR(hypergeom_pmf(r, {m, u, k}), expected, 1e-13 * std::max(expected, 1e-300))
                        << m << ' ' << u << ' ' << k << ' ' << r;
                }
            }
        }
    }
}

TEST(HypergeomPmf, SumsToOne)
{
    for (int n = 2; n <= 60; ++n)
        for (int m = 1; m < n; ++m)
            for (int k = 0; k <= n; ++k) {
                const HypergeomSpec s{m, n - m, k};
                double total = 0.0;
                for (auto r = s.r_min(); r <= s.r_max(); ++r)
                    total += hypergeom_pmf(r, s);
                ASSERT_NEAR(total, 1.0, 1e-12) << m << ' ' << n - m << ' ' << k;
            }
}

TEST(TailMass, MatchesDirectSummation)
{
    const HypergeomSpec specs[] = {{30, 70, 40}, {500, 1500, 300}, {2000, 50, 1000}, {7, 3, 9}};
    for (const auto& s : specs) {
        for (auto r = s.r_min() - 1; r <= s.r_max() + 1; ++r) {
            double lower = 0.0, upper = 0.0;
            for (auto j = s.r_min(); j <= s.r_max(); ++j) {
                const double p = hypergeom_pmf(j, s);
                (j <= r ? lower : upper) += p;
            }
            EXPECT_NEAR(lower_tail_mass(r, s), lower, 1e-12 + 1e-9 * lower);
            EXPECT_NEAR(upper_tail_mass(r + 1, s), upper, 1e-12 + 1e-9 * upper);
        }
    }
}

TEST(TailMass, FarTailsKeepRelativeAccuracy)
{
    const HypergeomSpec s{200, 200, 200};
    const double direct = hypergeom_pmf(0, s) + hypergeom_pmf(1, s) + hypergeom_pmf(2, s);
    EXPECT_GT(direct, 0.0);
    EXPECT_NEAR(lower_tail_mass(2, s) / direct, 1.0, 1e-12);
}

TEST(DeviationTail, Examples)
{
    EXPECT_NEAR(deviation_tail(0.5, {2, 2, 2}), 1.0 / 6.0, 1e-15);
    EXPECT_EQ(deviation_tail(0.1, {10, 10, 0}), 0.0);
    for (int k = 0; k <= 12; ++k)
        EXPECT_EQ(deviation_tail(static_cast<double>(k) / 5.0, {7, 5, k}), 0.0);
    EXPECT_THROW(deviation_tail(-0.1, {2, 2, 1}), DomainError);
}

TEST(DeviationTail, StrictInequalityAtTies)
{
    // m = u = 2, k = 2: deviations are 1 - r; the threshold 0 excludes r = 1.
    EXPECT_NEAR(deviation_tail(0.0, {2, 2, 2}), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(deviation_tail(1.0, {2, 2, 2}), 0.0, 0.0);
    // (k - r)/u - r/m with m = 3, u = 7: ties need exact arithmetic.
    const double tie = split_deviation(1, 4, 3, 7);
    double manual = 0.0;
    for (int r = 0; r <= 3; ++r)
        if (split_deviation(r, 4, 3, 7) > tie)
            manual += hypergeom_pmf(r, {3, 7, 4});
    EXPECT_EQ(deviation_tail(tie, {3, 7, 4}), manual);
}

TEST(DeviationTail, NonincreasingInEps)
{
    const HypergeomSpec s{40, 60, 35};
    double prev = 1.0;
    for (int i = 0; i <= 200; ++i) {
        const double t = deviation_tail(i / 200.0, s);
        EXPECT_LE(t, prev);
        prev = t;
    }
}

TEST(WorstCaseTail, FourPointPopulation)
{
    EXPECT_NEAR(worst_case_tail(0.0, 2, 2, DeviationKind::absolute).probability, 0.5, 1e-15);
    EXPECT_NEAR(worst_case_tail(0.5, 2, 2, DeviationKind::absolute).probability, 1.0 / 6.0, 1e-15);
    EXPECT_EQ(worst_case_tail(1.0, 2, 2, DeviationKind::absolute).probability, 0.0);
    EXPECT_EQ(worst_case_tail(50.0, 2, 2, DeviationKind::relative).probability, 0.0);
}

TEST(WorstCaseTail, MatchesMaxOverEnumeratedTails)
{
    for (auto kind : {DeviationKind::absolute, DeviationKind::relative}) {
        const int m = 5, u = 6;
        for (double eps : {0.0, 0.1, 0.25, 0.4, 0.7}) {
            double best = 0.0;
            for (int k = 1; k <= m + u; ++k) {
                const auto counts = enumerate_counts(m, u, k);
                std::int64_t hit = 0;
                for (int r = 0; r <= m; ++r) {
                    const double d = kind == DeviationKind::absolute ? split_deviation(r, k, m, u)
                                                                     : scaled_split_deviation(r, k, m, u);
                    if (d > eps)
                        hit += counts[static_cast<std::size_t>(r)];
                }
                best = std::max(best, static_cast<double>(hit) / static_cast<double>(binom(m + u, m)));
            }
            EXPECT_NEAR(worst_case_tail(eps, m, u, kind).probability, best, 1e-14) << to_string(kind) << eps;
        }
    }
}

TEST(CriticalDeviation, FourPointPopulation)
{
    const auto e = critical_deviation(1.0, 0.2, 2, 2, DeviationKind::absolute);
    EXPECT_EQ(e.value, 0.5);
    EXPECT_EQ(e.achieving_k, 2);
    EXPECT_EQ(e.kind, DeviationKind::absolute);
    EXPECT_EQ(critical_deviation(1.0, 0.6, 2, 2, DeviationKind::absolute).value, 0.0);
}

TEST(CriticalDeviation, IsSmallestThresholdMeetingTarget)
{
    const std::pair<int, int> sizes[] = {{3, 4}, {6, 5}, {10, 10}, {12, 3}};
    for (auto kind : {DeviationKind::absolute, DeviationKind::relative}) {
        for (auto [m, u] : sizes) {
            const auto cands = thresholds(m, u, kind);
            for (double target : {0.3, 0.1, 0.02, 1e-3}) {
                double expected = cands.back();
                for (double t : cands)
                    if (worst_case_tail(t, m, u, kind).probability <= target) {
                        expected = t;
                        break;
                    }
                const auto got = critical_deviation(1.0, target, m, u, kind);
                EXPECT_EQ(got.value, expected) << to_string(kind) << ' ' << m << ' ' << u << ' ' << target;
                EXPECT_LE(worst_case_tail(got.value, m, u, kind).probability, target);
            }
        }
    }
}

TEST(CriticalDeviation, NonincreasingInDeltaAndPrior)
{
    double prev = std::numeric_limits<double>::infinity();
    for (double d : {0.001, 0.01, 0.05, 0.1, 0.3}) {
        const double v = critical_deviation(1.0, d, 40, 40, DeviationKind::absolute).value;
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_GE(critical_deviation(0.01, 0.05, 40, 40, DeviationKind::relative).value,
              critical_deviation(1.0, 0.05, 40, 40, DeviationKind::relative).value);
}

TEST(CriticalDeviation, RejectsInvalid)
{
    EXPECT_THROW(critical_deviation(0.0, 0.1, 5, 5, DeviationKind::absolute), DomainError);
    EXPECT_THROW(critical_deviation(1.5, 0.1, 5, 5, DeviationKind::absolute), DomainError);
    EXPECT_THROW(critical_deviation(1.0, 1.0, 5, 5, DeviationKind::absolute), DomainError);
    EXPECT_THROW(critical_deviation(1e-200, 1e-200, 5, 5, DeviationKind::absolute), DomainError);
}

TEST(ScaledDeviation, ZeroErrorsConventionAndMonotonicity)
{
    EXPECT_EQ(scaled_split_deviation(0, 0, 5, 5), 0.0);
    for (std::int64_t k = 1; k <= 30; ++k) {
        const HypergeomSpec s{13, 17, k};
        for (auto r = s.r_min(); r < s.r_max(); ++r)
            EXPECT_GT(scaled_split_deviation(r, k, 13, 17), scaled_split_deviation(r + 1, k, 13, 17));
    }
    // (R_u - R_m)/sqrt(R_full) with R_u = 3/4, R_m = 0, R_full = 3/6.
    EXPECT_NEAR(scaled_split_deviation(0, 3, 2, 4), 0.75 / std::sqrt(0.5), 1e-15);
}

TEST(VapnikBound, Examples)
{
    EXPECT_EQ(vapnik_bound(0.0, {0.0, DeviationKind::relative, 0}, 10, 10).raw, 0.0);
    EXPECT_NEAR(vapnik_bound(0.2, {0.1, DeviationKind::absolute, 0}, 10, 10).raw, 0.3, 1e-15);
    const double e = 0.37;
    EXPECT_NEAR(vapnik_bound(0.0, {e, DeviationKind::relative, 0}, 25, 25).raw, e * e / 2.0, 1e-15);
    EXPECT_EQ(vapnik_bound(0.9, {0.5, DeviationKind::absolute, 0}, 10, 10).clamped, 1.0);
}

TEST(VapnikBound, RelativeBoundSolvesTheDeviationEquation)
{
    // At R_u = bound, (R_u - R_m)/sqrt(R_full) equals eps.
    const std::int64_t m = 30, u = 70;
    for (double r : {0.0, 0.05, 0.3}) {
        for (double e : {0.1, 0.4, 1.2}) {
            const double b = vapnik_bound(r, {e, DeviationKind::relative, 0}, m, u).raw;
            const double full = (m * r + u * b) / static_cast<double>(m + u);
            EXPECT_NEAR((b - r) / std::sqrt(full), e, 1e-12);
        }
    }
}
