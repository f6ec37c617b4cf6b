#include "tbound/concentration.hpp"

#include <cmath>
#include <limits>

namespace tbound {

namespace {

// x ln(x / y) with 0 ln 0 = 0.
double xlogx_over(double x, double y)
{
    if (x == 0.0)
        return 0.0;
    if (y == 0.0)
        return std::numeric_limits<double>::infinity();
    return x * std::log(x / y);
}

TailBound from_log(double log_value)
{
    TailBound b;
    b.log_value = log_value;
    b.value = log_value >= 0.0 ? 1.0 : std::exp(log_value);
    return b;
}

TailBound out_of_range()
{
    TailBound b;
    b.valid = false;
    return b;
}

void check_query(const PopulationSummary& pop, const DeviationQuery& q)
{
    require(q.m >= 1, "deviation query: m must be >= 1");
    require(q.m <= pop.size, "deviation query: m must not exceed the population size");
    require(q.eps >= 0.0, "deviation query: eps must be >= 0");
}

}  // namespace

PopulationSummary::PopulationSummary(std::int64_t size_, double mean_, double loss_bound_, bool binary_)
    : size(size_), mean(mean_), loss_bound(loss_bound_), binary(binary_)
{
    require(size >= 1, "PopulationSummary: size must be >= 1");
    require(loss_bound > 0.0, "PopulationSummary: loss bound must be positive");
    require(mean >= 0.0 && mean <= loss_bound, "PopulationSummary: mean must lie in [0, B]");
    if (binary)
        require(loss_bound == 1.0, "PopulationSummary: binary populations have B = 1");
}

PopulationSummary PopulationSummary::binary_population(std::int64_t size, std::int64_t ones)
{
    require(ones >= 0 && ones <= size, "binary_population: ones must lie in [0, size]");
    return {size, static_cast<double>(ones) / static_cast<double>(size), 1.0, true};
}

double binary_entropy(double nu)
{
    require(nu >= 0.0 && nu <= 1.0, "binary_entropy: nu must lie in [0,1]");
    double h = 0.0;
    if (nu > 0.0)
        h -= nu * std::log(nu);
    if (nu < 1.0)
        h -= (1.0 - nu) * std::log1p(-nu);
    return h;
}

double kl_binary(double nu, double mu)
{
    require(nu >= 0.0 && nu <= 1.0, "kl_binary: nu must lie in [0,1]");
    require(mu >= 0.0 && mu <= 1.0, "kl_binary: mu must lie in [0,1]");
    if (nu == mu)
        return 0.0;
    const double d = xlogx_over(nu, mu) + xlogx_over(1.0 - nu, 1.0 - mu);
    return std::max(d, 0.0);
}

TailBound hoeffding_bound(const PopulationSummary& pop, const DeviationQuery& q, HoeffdingForm form)
{
    check_query(pop, q);
    const double b = pop.loss_bound;
    const double m = static_cast<double>(q.m);
    if (form == HoeffdingForm::squared)
        return from_log(-2.0 * m * q.eps * q.eps / (b * b));
    const double base = pop.mean / b;
    if (q.eps > 1.0 - base)
        return out_of_range();
    return from_log(-m * kl_binary(std::min(base + q.eps, 1.0), base));
}

TailBound serfling_bound(const PopulationSummary& pop, const DeviationQuery& q)
{
    check_query(pop, q);
    const double b = pop.loss_bound;
    const double m = static_cast<double>(q.m);
    const double n = static_cast<double>(pop.size);
    return from_log(-(2.0 * m * q.eps * q.eps / (b * b)) * (n / (n - m + 1.0)));
}

TailBound direct_binary_bound(const PopulationSummary& pop, const DeviationQuery& q)
{
    check_query(pop, q);
    require(pop.binary, "direct_binary_bound: population must be binary");
    const double c = pop.mean;
    const double n = static_cast<double>(pop.size);
    const double m = static_cast<double>(q.m);
    const double beta = m / n;
    const double limit = std::min(1.0 - c, c * (1.0 - beta) / beta);
    if (q.eps > limit)
        return out_of_range();
    double exponent = -m * kl_binary(std::min(c + q.eps, 1.0), c);
    if (q.m < pop.size) {
        const double below = std::max(c - beta * q.eps / (1.0 - beta), 0.0);
        exponent -= (n - m) * kl_binary(below, c);
    }
    return from_log(exponent + 7.0 * std::log(n + 1.0));
}

}  // namespace tbound
