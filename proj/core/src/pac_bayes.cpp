#include "tbound/pac_bayes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace tbound {

namespace {

double complexity_of(const BoundInputs& in, bool want_kl, const char* who)
{
    if (want_kl) {
        const auto* kl = std::get_if<KlComplexity>(&in.complexity);
        require(kl != nullptr, who);
        return kl->value;
    }
    const auto* p = std::get_if<PriorMass>(&in.complexity);
    require(p != nullptr, who);
    return -std::log(p->value);
}

double as_double(std::int64_t v) { return static_cast<double>(v); }

// Reduction bound: R + ((m+u)/u) (sqrt(2 R C/(m-1)) + 2C/(m-1)),
// C = complexity + ln(m/delta).
double reduction_raw(const BoundInputs& in, double complexity)
{
    require(in.m >= 2, "reduction bound: m must be >= 2");
    require(in.loss_bound == 1.0, "reduction bound: stated for losses in [0,1] only");
    const double m = as_double(in.m);
    const double c = complexity + std::log(m / in.delta);
    const double excess =
        std::sqrt(2.0 * in.emp_risk * c / (m - 1.0)) + 2.0 * c / (m - 1.0);
    return in.emp_risk + full_to_test(excess, in.m, in.u);
}

// Direct bound: R + sqrt((2R(m+u)/u) T/(m-1)) + 2T/(m-1),
// T = complexity + ln(m/delta) + 7 ln(m+u+1).
double direct_raw(const BoundInputs& in, double complexity)
{
    require(in.m >= 2, "direct bound: m must be >= 2");
    require(in.loss_bound == 1.0, "direct bound: requires binary loss (B = 1)");
    const double m = as_double(in.m);
    const double n = as_double(in.m + in.u);
    const double t = complexity + std::log(m / in.delta) + 7.0 * std::log(n + 1.0);
    return in.emp_risk + std::sqrt(2.0 * in.emp_risk * n / as_double(in.u) * t / (m - 1.0)) +
           2.0 * t / (m - 1.0);
}

double serfling_raw(const BoundInputs& in, double complexity)
{
    const double m = as_double(in.m);
    const double u = as_double(in.u);
    const double n = m + u;
    const double spread = (n / u) * ((u + 1.0) / u) * (complexity - std::log(in.delta)) / (2.0 * m);
    return in.emp_risk + in.loss_bound * std::sqrt(spread);
}

}  // namespace

void BoundInputs::validate() const
{
    require(m >= 1, "BoundInputs: m must be >= 1");
    require(u >= 1, "BoundInputs: u must be >= 1");
    require(delta > 0.0 && delta < 1.0, "BoundInputs: delta must lie in (0,1)");
    require(loss_bound > 0.0, "BoundInputs: loss bound must be positive");
    require(emp_risk >= 0.0 && emp_risk <= loss_bound, "BoundInputs: emp_risk must lie in [0, B]");
    if (const auto* p = std::get_if<PriorMass>(&complexity))
        require(p->value > 0.0 && p->value <= 1.0, "BoundInputs: prior mass must lie in (0,1]");
    else
        require(std::get<KlComplexity>(complexity).value >= 0.0, "BoundInputs: KL value must be >= 0");
}

double full_to_test(double full_excess, std::int64_t m, std::int64_t u)
{
    require(u >= 1, "full_to_test: u must be >= 1");
    return as_double(m + u) / as_double(u) * full_excess;
}

double risk_mix(double train_risk, double test_risk, std::int64_t m, std::int64_t u)
{
    require(m >= 1 && u >= 1, "risk_mix: m and u must be >= 1");
    return (as_double(m) * train_risk + as_double(u) * test_risk) / as_double(m + u);
}

double invert_self_bounding(double a, double b)
{
    require(a >= 0.0 && b >= 0.0, "invert_self_bounding: a and b must be >= 0");
    return a + b + std::sqrt(a * b);
}

BoundValue gibbs_bound(const BoundInputs& inputs, GibbsVariant variant)
{
    inputs.validate();
    const double d = complexity_of(inputs, true, "gibbs_bound: needs a KL complexity");
    if (variant == GibbsVariant::reduction)
        return BoundValue::make("thm17", reduction_raw(inputs, d), inputs.loss_bound);
    return BoundValue::make("thm18", direct_raw(inputs, d), inputs.loss_bound);
}

BoundValue deterministic_bound(const BoundInputs& inputs, DeterministicVariant variant)
{
    inputs.validate();
    const double c = complexity_of(inputs, false, "deterministic_bound: needs a prior mass");
    switch (variant) {
    case DeterministicVariant::reduction:
        return BoundValue::make("eq18", reduction_raw(inputs, c), inputs.loss_bound);
    case DeterministicVariant::serfling:
        return BoundValue::make("thm22", serfling_raw(inputs, c), inputs.loss_bound);
    case DeterministicVariant::direct:
        return BoundValue::make("cor23", direct_raw(inputs, c), inputs.loss_bound);
    }
    throw DomainError("deterministic_bound: unknown variant");
}

BoundValue graepel_compression_bound(double emp_risk, std::int64_t m, std::int64_t s, double delta)
{
    require(m >= 1, "graepel_compression_bound: m must be >= 1");
    require(s >= 0 && s < m, "graepel_compression_bound: need 0 <= s < m");
    require(delta > 0.0 && delta < 1.0, "graepel_compression_bound: delta must lie in (0,1)");
    require(emp_risk >= 0.0 && emp_risk <= 1.0, "graepel_compression_bound: emp_risk must lie in [0,1]");
    const double md = as_double(m);
    const double sd = as_double(s);
    const double code = s == 0 ? 0.0 : sd * std::log(2.0 * std::numbers::e * md / sd);
    const double spread = (code - std::log(delta) + 2.0 * std::log(md)) / (2.0 * (md - sd));
    return BoundValue::make("graepel", md / (md - sd) * emp_risk + std::sqrt(spread));
}

GibbsEnsemble::GibbsEnsemble(std::vector<Labeling> hypotheses, std::vector<double> posterior,
                             std::vector<double> prior)
    : hypotheses_(std::move(hypotheses)), posterior_(std::move(posterior)), prior_(std::move(prior))
{
    require(!hypotheses_.empty(), "GibbsEnsemble: needs at least one hypothesis");
    require(posterior_.size() == hypotheses_.size() && prior_.size() == hypotheses_.size(),
            "GibbsEnsemble: posterior and prior must match the hypothesis count");
    for (const auto* weights : {&posterior_, &prior_}) {
        double total = 0.0;
        for (double w : *weights) {
            require(w >= 0.0, "GibbsEnsemble: weights must be nonnegative");
            total += w;
        }
        require(std::abs(total - 1.0) <= 1e-12, "GibbsEnsemble: weights must sum to 1");
    }
    const auto width = hypotheses_.front().size();
    for (const auto& h : hypotheses_)
        require(h.size() == width, "GibbsEnsemble: hypotheses must label the same points");
}

double GibbsEnsemble::kl_divergence() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < posterior_.size(); ++i) {
        if (posterior_[i] == 0.0)
            continue;
        if (prior_[i] == 0.0)
            return std::numeric_limits<double>::infinity();
        d += posterior_[i] * std::log(posterior_[i] / prior_[i]);
    }
    return std::max(d, 0.0);
}

double gibbs_risk(const GibbsEnsemble& ensemble, std::span<const std::int8_t> target,
                  std::span<const std::size_t> subset)
{
    require(!subset.empty(), "gibbs_risk: subset must be nonempty");
    const auto& hyps = ensemble.hypotheses();
    for (std::size_t idx : subset)
        require(idx < target.size() && idx < hyps.front().size(), "gibbs_risk: index out of range");
    double risk = 0.0;
    for (std::size_t j = 0; j < hyps.size(); ++j) {
        const double w = ensemble.posterior()[j];
        if (w == 0.0)
            continue;
        std::size_t wrong = 0;
        for (std::size_t idx : subset)
            wrong += hyps[j][idx] != target[idx];
        risk += w * static_cast<double>(wrong) / static_cast<double>(subset.size());
    }
    return risk;
}

}  // namespace tbound
