#include "tbound/exact_hypergeom.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tbound {

namespace {

constexpr double kNegligible = 1e-18;

// ln n! - [(n + 1/2) ln n - n + ln sqrt(2 pi)], n >= 1.
long double stirling_error(std::int64_t n)
{
    const long double x = static_cast<long double>(n);
    if (n <= 15) {
        return std::lgamma(x + 1.0L) - (x + 0.5L) * std::log(x) + x -
               0.5L * std::log(2.0L * std::numbers::pi_v<long double>);
    }
    const long double inv = 1.0L / x;
    const long double inv2 = inv * inv;
    return inv * (1.0L / 12 - inv2 * (1.0L / 360 - inv2 * (1.0L / 1260 - inv2 / 1680)));
}

std::int64_t mode_of(const HypergeomSpec& s)
{
    const auto n = s.population();
    const auto mode = static_cast<std::int64_t>(
        (static_cast<int128>(s.m + 1) * (s.k + 1)) / (n + 2));
    return std::clamp(mode, s.r_min(), s.r_max());
}

double log_pmf(std::int64_t r, const HypergeomSpec& s)
{
    return log_binomial(s.k, r) + log_binomial(s.population() - s.k, s.m - r) -
           log_binomial(s.population(), s.m);
}

// Sum of pmf(r) for r from `start` moving by `step` (+1 or -1) while inside
// [r_min, r_max]. Terms decrease monotonically because `start` lies on the
// far side of the mode.
double directed_tail(std::int64_t start, int step, const HypergeomSpec& s)
{
    const auto n = s.population();
    double term = 1.0;
    double sum = 1.0;
    std::int64_t r = start;
    while (true) {
        const std::int64_t next = r + step;
        if (next < s.r_min() || next > s.r_max())
            break;
        double ratio;
        if (step < 0) {
            ratio = static_cast<double>(r) * static_cast<double>(n - s.k - s.m + r) /
                    (static_cast<double>(s.k - r + 1) * static_cast<double>(s.m - r + 1));
        } else {
            ratio = static_cast<double>(s.k - r) * static_cast<double>(s.m - r) /
                    (static_cast<double>(r + 1) * static_cast<double>(n - s.k - s.m + r + 1));
        }
        term *= ratio;
        sum += term;
        r = next;
        if (term <= sum * kNegligible)
            break;
    }
    return std::exp(log_pmf(start, s) + std::log(sum));
}

using DeviationFn = double (*)(std::int64_t, std::int64_t, std::int64_t, std::int64_t);

// Largest r in [r_min, r_max] whose deviation exceeds eps, or r_min - 1.
// Deviations decrease in r; `guess` only seeds the local search.
std::int64_t largest_r_above(double eps, const HypergeomSpec& s, DeviationFn deviation,
                             double guess)
{
    const auto lo = s.r_min();
    const auto hi = s.r_max();
    std::int64_t r;
    if (!(guess > static_cast<double>(lo)))
        r = lo;
    else if (guess >= static_cast<double>(hi))
        r = hi;
    else
        r = static_cast<std::int64_t>(std::floor(guess));
    while (r < hi && deviation(r + 1, s.k, s.m, s.u) > eps)
        ++r;
    while (r >= lo && !(deviation(r, s.k, s.m, s.u) > eps))
        --r;
    return r;
}

struct TailScan {
    double probability = 0.0;
    std::int64_t argmax_k = 0;
    // Smallest attainable deviation strictly above the scanned threshold.
    double next_above = std::numeric_limits<double>::infinity();
};

TailScan scan_worst_case(double eps, std::int64_t m, std::int64_t u, DeviationKind kind)
{
    const auto n = m + u;
    const DeviationFn deviation =
        kind == DeviationKind::absolute ? &split_deviation : &scaled_split_deviation;
    TailScan out;
    for (std::int64_t k = 1; k <= n; ++k) {
        const HypergeomSpec s{m, u, k};
        double scale = 1.0;
        if (kind == DeviationKind::relative)
            scale = std::sqrt(static_cast<double>(k) / static_cast<double>(n));
        const double guess = (static_cast<double>(k) * static_cast<double>(m) -
                              eps * scale * static_cast<double>(m) * static_cast<double>(u)) /
                             static_cast<double>(n);
        const auto r_hi = largest_r_above(eps, s, deviation, guess);
        if (r_hi < s.r_min())
            continue;
        out.next_above = std::min(out.next_above, deviation(r_hi, k, m, u));
        const double tail = lower_tail_mass(r_hi, s);
        if (tail > out.probability) {
            out.probability = tail;
            out.argmax_k = k;
        }
    }
    return out;
}

}  // namespace

HypergeomSpec::HypergeomSpec(std::int64_t m_, std::int64_t u_, std::int64_t k_) : m(m_), u(u_), k(k_)
{
    require(m >= 1, "HypergeomSpec: m must be >= 1");
    require(u >= 1, "HypergeomSpec: u must be >= 1");
    require(k >= 0 && k <= m + u, "HypergeomSpec: k must lie in [0, m+u]");
}

const char* to_string(DeviationKind kind)
{
    return kind == DeviationKind::relative ? "relative" : "absolute";
}

double log_binomial(std::int64_t n, std::int64_t r)
{
    require(n >= 0 && r >= 0, "log_binomial: arguments must be nonnegative");
    require(r <= n, "log_binomial: r must not exceed n");
    r = std::min(r, n - r);
    if (r == 0)
        return 0.0;
    if (r <= 30) {
        long double acc = 0.0L;
        const long double rest = static_cast<long double>(n - r);
        for (std::int64_t i = 1; i <= r; ++i)
            acc += std::log1p(rest / static_cast<long double>(i));
        return static_cast<double>(acc);
    }
    // Loader's decomposition: every term below is positive or small, so no
    // large cancellation occurs.
    const long double nn = static_cast<long double>(n);
    const long double rr = static_cast<long double>(r);
    const long double rest = nn - rr;
    const long double main = rr * std::log(nn / rr) - rest * std::log1p(-rr / nn);
    const long double prefactor =
        0.5L * std::log(nn / (2.0L * std::numbers::pi_v<long double> * rr * rest));
    return static_cast<double>(main + prefactor + stirling_error(n) - stirling_error(r) -
                               stirling_error(n - r));
}

double hypergeom_pmf(std::int64_t r, const HypergeomSpec& spec)
{
    if (r < spec.r_min() || r > spec.r_max())
        return 0.0;
    return std::exp(log_pmf(r, spec));
}

double lower_tail_mass(std::int64_t r_hi, const HypergeomSpec& spec)
{
    if (r_hi < spec.r_min())
        return 0.0;
    if (r_hi >= spec.r_max())
        return 1.0;
    if (r_hi < mode_of(spec))
        return std::min(directed_tail(r_hi, -1, spec), 1.0);
    return std::clamp(1.0 - upper_tail_mass(r_hi + 1, spec), 0.0, 1.0);
}

double upper_tail_mass(std::int64_t r_lo, const HypergeomSpec& spec)
{
    if (r_lo <= spec.r_min())
        return 1.0;
    if (r_lo > spec.r_max())
        return 0.0;
    if (r_lo > mode_of(spec))
        return std::min(directed_tail(r_lo, +1, spec), 1.0);
    return std::clamp(1.0 - lower_tail_mass(r_lo - 1, spec), 0.0, 1.0);
}

double split_deviation(std::int64_t r, std::int64_t k, std::int64_t m, std::int64_t u)
{
    return static_cast<double>((k - r) * m - r * u) / static_cast<double>(m * u);
}

double scaled_split_deviation(std::int64_t r, std::int64_t k, std::int64_t m, std::int64_t u)
{
    if (k == 0)
        return 0.0;
    const std::int64_t n = m + u;
    const std::int64_t d = (k - r) * m - r * u;
    if (d == 0)
        return 0.0;
    // The exact path is chosen per (k, m, u) so values stay monotone in r.
    constexpr int128 exact_limit = static_cast<int128>(1) << 53;
    const int128 d_max = static_cast<int128>(n) * std::max(m, u);
    const int128 den = static_cast<int128>(m) * m * u * u * k;
    if (d_max * d_max * n < exact_limit && den < exact_limit) {
        const int128 num = static_cast<int128>(d) * d * n;
        const double mag = std::sqrt(static_cast<double>(num) / static_cast<double>(den));
        return d > 0 ? mag : -mag;
    }
    return static_cast<double>(d) / static_cast<double>(m * u) *
           std::sqrt(static_cast<double>(n) / static_cast<double>(k));
}

double deviation_tail(double eps, const HypergeomSpec& spec)
{
    require(eps >= 0.0, "deviation_tail: eps must be >= 0");
    if (spec.k == 0)
        return 0.0;
    const double guess = (static_cast<double>(spec.k) * static_cast<double>(spec.m) -
                          eps * static_cast<double>(spec.m) * static_cast<double>(spec.u)) /
                         static_cast<double>(spec.population());
    const auto r_hi = largest_r_above(eps, spec, &split_deviation, guess);
    return lower_tail_mass(r_hi, spec);
}

WorstCaseTail worst_case_tail(double eps, std::int64_t m, std::int64_t u, DeviationKind kind)
{
    require(eps >= 0.0, "worst_case_tail: eps must be >= 0");
    require(m >= 1 && u >= 1, "worst_case_tail: m and u must be >= 1");
    const auto scan = scan_worst_case(eps, m, u, kind);
    return {scan.probability, scan.argmax_k};
}

CriticalDeviation critical_deviation(double prior_mass, double delta, std::int64_t m,
                                     std::int64_t u, DeviationKind kind)
{
    require(prior_mass > 0.0 && prior_mass <= 1.0, "critical_deviation: prior_mass must be in (0,1]");
    require(delta > 0.0 && delta < 1.0, "critical_deviation: delta must be in (0,1)");
    require(m >= 1 && u >= 1, "critical_deviation: m and u must be >= 1");
    const double target = prior_mass * delta;
    require(target > 0.0, "critical_deviation: prior_mass * delta underflows to 0");

    auto lo_scan = scan_worst_case(0.0, m, u, kind);
    if (lo_scan.probability <= target)
        return {0.0, kind, lo_scan.argmax_k};

    const DeviationFn deviation =
        kind == DeviationKind::absolute ? &split_deviation : &scaled_split_deviation;
    double lo = 0.0;
    // The largest attainable deviation has an empty strict tail.
    double hi = 0.0;
    for (std::int64_t k = 1; k <= m + u; ++k)
        hi = std::max(hi, deviation(HypergeomSpec{m, u, k}.r_min(), k, m, u));
    while (true) {
        // Nothing attainable lies in (lo, c), so the tail is constant there.
        const double c = lo_scan.next_above;
        const auto c_scan = scan_worst_case(c, m, u, kind);
        if (c_scan.probability <= target)
            return {c, kind, c_scan.argmax_k};
        lo = c;
        lo_scan = c_scan;
        const double mid = lo + (hi - lo) / 2;
        if (mid > lo && mid < hi) {
            auto mid_scan = scan_worst_case(mid, m, u, kind);
            if (mid_scan.probability <= target) {
                hi = mid;
            } else {
                lo = mid;
                lo_scan = mid_scan;
            }
        }
    }
}

BoundValue vapnik_bound(double emp_risk, const CriticalDeviation& threshold, std::int64_t m,
                        std::int64_t u)
{
    require(emp_risk >= 0.0 && emp_risk <= 1.0, "vapnik_bound: emp_risk must be in [0,1]");
    require(m >= 1 && u >= 1, "vapnik_bound: m and u must be >= 1");
    const double e = threshold.value;
    if (threshold.kind == DeviationKind::absolute)
        return BoundValue::make("vapnik_abs", emp_risk + e);
    const double half = e * static_cast<double>(u) / (2.0 * static_cast<double>(m + u));
    const double raw = emp_risk + e * half + e * std::sqrt(emp_risk + half * half);
    return BoundValue::make("vapnik_rel", raw);
}

}  // namespace tbound
