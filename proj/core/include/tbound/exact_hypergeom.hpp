#pragma once

#include <cstdint>

#include "tbound/common.hpp"

/// Exact hypergeometric machinery for a random train/test split of a fixed
/// full sample, and the implicit transductive bounds built on its tails.
///
/// All combinatorics run in natural-log space. Deviation events use a strict
/// inequality, so a tail evaluated exactly at an attained deviation value
/// excludes that value.

namespace tbound {

/// A full sample of m + u points, k of which a fixed hypothesis gets wrong.
struct HypergeomSpec {
    std::int64_t m = 0;
    std::int64_t u = 0;
    std::int64_t k = 0;

    HypergeomSpec() = default;
    HypergeomSpec(std::int64_t m, std::int64_t u, std::int64_t k);

    std::int64_t population() const { return m + u; }
    /// Smallest and largest number of errors that can land in the training part.
    std::int64_t r_min() const { return std::max<std::int64_t>(k - u, 0); }
    std::int64_t r_max() const { return std::min(m, k); }
};

enum class DeviationKind {
    relative,  // (R_u - R_m) / sqrt(R_full)
    absolute,  // R_u - R_m
};

const char* to_string(DeviationKind kind);

/// ln C(n, r). Absolute error below 1e-10 for n up to 10^6.
double log_binomial(std::int64_t n, std::int64_t r);

/// Probability that exactly r of the k errors fall into the m training points.
double hypergeom_pmf(std::int64_t r, const HypergeomSpec& spec);

/// Pr{training errors <= r_hi}.
double lower_tail_mass(std::int64_t r_hi, const HypergeomSpec& spec);
/// Pr{training errors >= r_lo}.
double upper_tail_mass(std::int64_t r_lo, const HypergeomSpec& spec);

/// Test-minus-train error rate when r of the k errors are in training:
/// (k - r)/u - r/m, evaluated as one correctly rounded division.
double split_deviation(std::int64_t r, std::int64_t k, std::int64_t m, std::int64_t u);

/// Relative deviation (R_u - R_m)/sqrt(R_full) for the same split; 0 when
/// k = 0. Mathematically equal values map to the same double whenever the
/// underlying integers fit in 53 bits.
double scaled_split_deviation(std::int64_t r, std::int64_t k, std::int64_t m, std::int64_t u);

/// Pr{R_u - R_m > eps} over uniformly random training subsets.
double deviation_tail(double eps, const HypergeomSpec& spec);

struct WorstCaseTail {
    double probability = 0.0;
    std::int64_t argmax_k = 0;
};

/// Maximum over k in 0..m+u of the deviation tail. For the relative kind the
/// tail at k is evaluated at sqrt(k/(m+u)) * eps; k = 0 contributes 0.
WorstCaseTail worst_case_tail(double eps, std::int64_t m, std::int64_t u, DeviationKind kind);

/// The smallest deviation threshold whose worst-case tail is at most
/// prior_mass * delta.
struct CriticalDeviation {
    double value = 0.0;
    DeviationKind kind = DeviationKind::absolute;
    /// The k attaining the maximum of the worst-case tail at `value`.
    std::int64_t achieving_k = 0;
};

/// Exact minimizer over the finite set of attainable thresholds plus 0.
///
/// The worst-case tail is a step function that only changes at attainable
/// deviation values, so the search walks that set directly: each round
/// evaluates the tail at the next attainable value above the current lower
/// end and halves the remaining interval.
CriticalDeviation critical_deviation(double prior_mass, double delta, std::int64_t m,
                                     std::int64_t u, DeviationKind kind);

/// Vapnik's bound on the test risk. The relative kind solves the quadratic in
/// R_u; the absolute kind is R_hat + threshold.
BoundValue vapnik_bound(double emp_risk, const CriticalDeviation& threshold, std::int64_t m,
                        std::int64_t u);

}  // namespace tbound
