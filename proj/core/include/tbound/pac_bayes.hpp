#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "tbound/common.hpp"

/// Explicit PAC-Bayesian bounds on the test risk of a transductive learner,
/// for Gibbs (randomized) and deterministic hypotheses.
///
/// Every bound consumes one BoundInputs record. The complexity term is either
/// a prior mass p(h) (deterministic bounds, complexity ln(1/p)) or a KL value
/// D(q||p) (Gibbs bounds). Calling a bound with the wrong kind of complexity
/// is a DomainError.

namespace tbound {

struct PriorMass {
    double value = 1.0;
};

struct KlComplexity {
    double value = 0.0;
};

struct BoundInputs {
    std::int64_t m = 0;
    std::int64_t u = 0;
    double delta = 0.05;
    double emp_risk = 0.0;
    std::variant<PriorMass, KlComplexity> complexity = PriorMass{};
    double loss_bound = 1.0;

    /// Checks the record's own invariants (not any particular bound's).
    void validate() const;
};

enum class GibbsVariant {
    reduction,  // via sampling with replacement; any u
    direct,     // counting argument; binary loss only
};

enum class DeterministicVariant {
    reduction,  // Gibbs reduction bound with D = ln(1/p)
    serfling,   // Serfling-based; any bounded loss
    direct,     // Gibbs direct bound with D = ln(1/p); binary loss only
};

/// Converts an excess over the full-sample risk into one over the test risk:
/// ((m+u)/u) * full_excess.
double full_to_test(double full_excess, std::int64_t m, std::int64_t u);

/// Full-sample risk from training and test risks: (m R_m + u R_u)/(m+u).
double risk_mix(double train_risk, double test_risk, std::int64_t m, std::int64_t u);

/// Upper bound a + b + sqrt(ab) on every z >= 0 with z <= a + sqrt(z b).
double invert_self_bounding(double a, double b);

BoundValue gibbs_bound(const BoundInputs& inputs, GibbsVariant variant);

BoundValue deterministic_bound(const BoundInputs& inputs, DeterministicVariant variant);

/// Inductive compression bound of Graepel et al. for s support vectors among
/// m training points; a baseline for the transductive compression bound.
BoundValue graepel_compression_bound(double emp_risk, std::int64_t m, std::int64_t s, double delta);

using Labeling = std::vector<std::int8_t>;

/// Finite set of full-sample labelings with a prior and a posterior over them.
class GibbsEnsemble {
public:
    GibbsEnsemble(std::vector<Labeling> hypotheses, std::vector<double> posterior,
                  std::vector<double> prior);

    const std::vector<Labeling>& hypotheses() const { return hypotheses_; }
    const std::vector<double>& posterior() const { return posterior_; }
    const std::vector<double>& prior() const { return prior_; }

    /// D(posterior || prior); +inf if the posterior leaves the prior's support.
    double kl_divergence() const;

private:
    std::vector<Labeling> hypotheses_;
    std::vector<double> posterior_;
    std::vector<double> prior_;
};

/// Expected 0/1 risk on `subset` of a hypothesis drawn from the posterior.
double gibbs_risk(const GibbsEnsemble& ensemble, std::span<const std::int8_t> target,
                  std::span<const std::size_t> subset);

}  // namespace tbound
