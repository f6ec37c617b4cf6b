#pragma once

#include <cstdint>

#include "tbound/common.hpp"

// Priors built from the unlabeled full sample alone, and the transductive
// bounds they induce for compression schemes and clustering-based learners.

namespace tbound {

/// Uniform mixture over s = 1..m of uniform sub-priors on the worst-case
/// hypothesis sets of size 2^s C(m+u, s).
struct CompressionPrior {
    std::int64_t m = 0;
    std::int64_t u = 0;

    CompressionPrior(std::int64_t m, std::int64_t u);

    std::int64_t max_tau() const { return m; }
    /// ln of the number of hypotheses reachable from s compression points.
    double log_support_size(std::int64_t s) const;
    /// ln of the mass the s-th component alone gives each of its hypotheses.
    double log_component_mass(std::int64_t s) const;
    /// Total mass, summed per component in log space. Equals 1.
    double total_mass() const;
};

/// Uniform mixture over tau = 1..c (and k clusterers) of the uniform prior on
/// the 2^tau cluster labelings of each partition.
struct ClusteringPrior {
    std::int64_t c = 0;
    std::int64_t k_ensemble = 1;

    ClusteringPrior(std::int64_t c, std::int64_t k_ensemble = 1);

    /// ln p(h) for a labeling of a tau-cluster partition.
    double log_mass(std::int64_t tau) const;
    /// Total mass as an exact ratio numerator/denominator (c <= 62).
    struct Ratio {
        uint128 numerator = 0;
        uint128 denominator = 1;
    };
    Ratio total_mass() const;
};

struct CompressionComplexity {
    /// s ln(2e(m+u)/s) + ln m, from C(n,s) <= (en/s)^s.
    double relaxed = 0.0;
    /// ln m + s ln 2 + ln C(m+u, s) = ln(1/p(h)) under the mixture prior.
    double exact = 0.0;
};

CompressionComplexity compression_complexity(std::int64_t s, std::int64_t m, std::int64_t u);

enum class CompressionVariant {
    printed,  // denominator m
    derived,  // denominator 2m, the Serfling bound with the relaxed complexity
};

BoundValue compression_bound(double emp_risk, std::int64_t s, std::int64_t m, std::int64_t u,
                             double delta, CompressionVariant variant = CompressionVariant::derived);

enum class ClusteringVariant {
    printed,  // tau + ln(kc)
    exact,    // tau ln 2 + ln(kc) = ln(1/p(h))
};

/// Complexity term without the ln(1/delta) contribution.
double clustering_complexity(std::int64_t tau, std::int64_t c, std::int64_t k_ensemble,
                             ClusteringVariant variant = ClusteringVariant::exact);

BoundValue clustering_bound(double emp_risk, std::int64_t tau, std::int64_t c, std::int64_t m,
                            std::int64_t u, double delta, std::int64_t k_ensemble = 1,
                            ClusteringVariant variant = ClusteringVariant::exact);

}  // namespace tbound
