#pragma once

#include <cstdint>

#include "tbound/common.hpp"

// Tail bounds for the mean of a sample drawn without replacement from a
// finite population, plus the binary entropy utilities they are built on.
// All logarithms are natural.

namespace tbound {

/// A finite population of N values in [0, B] with mean `mean`.
struct PopulationSummary {
    std::int64_t size = 0;
    double mean = 0.0;
    double loss_bound = 1.0;
    bool binary = false;

    PopulationSummary() = default;
    PopulationSummary(std::int64_t size, double mean, double loss_bound, bool binary);

    /// A {0,1} population with `ones` ones.
    static PopulationSummary binary_population(std::int64_t size, std::int64_t ones);
};

/// Pr{Z - EZ >= eps} for the mean Z of m draws.
struct DeviationQuery {
    std::int64_t m = 0;
    double eps = 0.0;
};

/// A probability bound. `value` is clamped to [0,1]; `log_value` is the
/// unclamped exponent so bounds can be compared where both exceed 1.
/// `valid` is false when the query fell outside the bound's stated range,
/// in which case value = 1 and log_value = 0.
struct TailBound {
    double value = 1.0;
    double log_value = 0.0;
    bool valid = true;
};

enum class HoeffdingForm { kl, squared };

double binary_entropy(double nu);

/// D(nu || mu); +inf when nu > 0 = mu or nu < 1 = mu.
double kl_binary(double nu, double mu);

/// Hoeffding's bounds via reduction to sampling with replacement. The kl form
/// requires eps <= 1 - mean/B.
TailBound hoeffding_bound(const PopulationSummary& pop, const DeviationQuery& q, HoeffdingForm form);

/// Serfling's bound; tighter than Hoeffding's squared form for m >= 2.
TailBound serfling_bound(const PopulationSummary& pop, const DeviationQuery& q);

/// Counting bound for binary populations:
/// exp{-m D(c+eps||c) - (N-m) D(c - beta eps/(1-beta) || c) + 7 ln(N+1)},
/// beta = m/N, valid for eps <= min{1 - c, c(1-beta)/beta}.
TailBound direct_binary_bound(const PopulationSummary& pop, const DeviationQuery& q);

}  // namespace tbound
