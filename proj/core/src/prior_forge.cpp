#include "tbound/prior_forge.hpp"

#include <cmath>
#include <numbers>

#include "tbound/exact_hypergeom.hpp"

namespace tbound {

namespace {

// sqrt(((m+u)/u) ((u+1)/u) x / denom)
double serfling_excess(std::int64_t m, std::int64_t u, double x, double denom)
{
    const double md = static_cast<double>(m);
    const double ud = static_cast<double>(u);
    return std::sqrt((md + ud) / ud * ((ud + 1.0) / ud) * x / denom);
}

void check_sizes(std::int64_t m, std::int64_t u, double delta, double emp_risk)
{
    require(m >= 1 && u >= 1, "bound: m and u must be >= 1");
    require(delta > 0.0 && delta < 1.0, "bound: delta must lie in (0,1)");
    require(emp_risk >= 0.0 && emp_risk <= 1.0, "bound: emp_risk must lie in [0,1]");
}

}  // namespace

CompressionPrior::CompressionPrior(std::int64_t m_, std::int64_t u_) : m(m_), u(u_)
{
    require(m >= 1 && u >= 1, "CompressionPrior: m and u must be >= 1");
}

double CompressionPrior::log_support_size(std::int64_t s) const
{
    require(s >= 1 && s <= m, "CompressionPrior: s must lie in [1, m]");
    return static_cast<double>(s) * std::numbers::ln2 + log_binomial(m + u, s);
}

double CompressionPrior::log_component_mass(std::int64_t s) const
{
    return -std::log(static_cast<double>(m)) - log_support_size(s);
}

double CompressionPrior::total_mass() const
{
    double total = 0.0;
    for (std::int64_t s = 1; s <= m; ++s)
        total += std::exp(log_component_mass(s) + log_support_size(s));
    return total;
}

ClusteringPrior::ClusteringPrior(std::int64_t c_, std::int64_t k_) : c(c_), k_ensemble(k_)
{
    require(c >= 1, "ClusteringPrior: c must be >= 1");
    require(k_ensemble >= 1, "ClusteringPrior: k_ensemble must be >= 1");
}

double ClusteringPrior::log_mass(std::int64_t tau) const
{
    require(tau >= 1 && tau <= c, "ClusteringPrior: tau must lie in [1, c]");
    return -std::log(static_cast<double>(k_ensemble * c)) - static_cast<double>(tau) * std::numbers::ln2;
}

ClusteringPrior::Ratio ClusteringPrior::total_mass() const
{
    require(c <= 62, "ClusteringPrior::total_mass: exact ratio supports c <= 62");
    // Each of the k c partitions carries 2^tau labelings of mass 1/(k c 2^tau);
    // over the common denominator k c 2^c each labeling contributes 2^(c - tau).
    Ratio r;
    r.denominator = static_cast<uint128>(k_ensemble) * static_cast<uint128>(c) * (uint128{1} << c);
    for (std::int64_t clusterer = 0; clusterer < k_ensemble; ++clusterer)
        for (std::int64_t tau = 1; tau <= c; ++tau)
            r.numerator += (uint128{1} << tau) * (uint128{1} << (c - tau));
    return r;
}

CompressionComplexity compression_complexity(std::int64_t s, std::int64_t m, std::int64_t u)
{
    require(m >= 1 && u >= 1, "compression_complexity: m and u must be >= 1");
    require(s >= 1 && s <= m, "compression_complexity: s must lie in [1, m]");
    const double sd = static_cast<double>(s);
    const double n = static_cast<double>(m + u);
    const double log_m = std::log(static_cast<double>(m));
    CompressionComplexity out;
    out.relaxed = sd * std::log(2.0 * std::numbers::e * n / sd) + log_m;
    out.exact = log_m + CompressionPrior(m, u).log_support_size(s);
    return out;
}

BoundValue compression_bound(double emp_risk, std::int64_t s, std::int64_t m, std::int64_t u,
                             double delta, CompressionVariant variant)
{
    check_sizes(m, u, delta, emp_risk);
    const double x = compression_complexity(s, m, u).relaxed - std::log(delta);
    const double md = static_cast<double>(m);
    if (variant == CompressionVariant::printed)
        return BoundValue::make("compression_printed", emp_risk + serfling_excess(m, u, x, md));
    return BoundValue::make("compression_derived", emp_risk + serfling_excess(m, u, x, 2.0 * md));
}

double clustering_complexity(std::int64_t tau, std::int64_t c, std::int64_t k_ensemble,
                             ClusteringVariant variant)
{
    const ClusteringPrior prior(c, k_ensemble);
    require(tau >= 1 && tau <= c, "clustering_complexity: tau must lie in [1, c]");
    if (variant == ClusteringVariant::exact)
        return -prior.log_mass(tau);
    return static_cast<double>(tau) + std::log(static_cast<double>(k_ensemble * c));
}

BoundValue clustering_bound(double emp_risk, std::int64_t tau, std::int64_t c, std::int64_t m,
                            std::int64_t u, double delta, std::int64_t k_ensemble,
                            ClusteringVariant variant)
{
    check_sizes(m, u, delta, emp_risk);
    const double x = clustering_complexity(tau, c, k_ensemble, variant) - std::log(delta);
    const double excess = serfling_excess(m, u, x, 2.0 * static_cast<double>(m));
    return BoundValue::make(variant == ClusteringVariant::exact ? "cor27_exact" : "cor27_printed",
                            emp_risk + excess);
}

}  // namespace tbound
