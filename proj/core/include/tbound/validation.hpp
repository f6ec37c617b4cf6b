#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbound/cluster_transduce.hpp"
#include "tbound/pac_bayes.hpp"

// Monte-Carlo and exhaustive checks of the probabilistic statements: random
// training/test splits of a fixed full sample, the unbiasedness of the
// training error, concentration tails and delta-validity of every bound.

namespace tbound {

/// Seed for one trial: the SplitMix64 finalizer applied to
/// master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15.
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t trial_index);

struct SplitSampler {
    std::int64_t N = 0;
    std::int64_t m = 0;
    std::uint64_t master_seed = 0;

    SplitSampler(std::int64_t N, std::int64_t m, std::uint64_t master_seed);
};

/// Uniform m-subset of 0..N-1, sorted ascending. Depends only on
/// (master_seed, trial_index).
std::vector<std::int64_t> sample_split(const SplitSampler& sampler, std::uint64_t trial_index);

/// Violation counts against an analytic reference p (a bound or delta).
/// tolerance = 3 sqrt(p(1-p)/trials); passed iff empirical <= analytic + tolerance.
/// boundary_hits counts non-violating trials whose deviation sat exactly on
/// the threshold (vapnik scenarios); they are reported, not counted.
struct McReport {
    std::string label;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    std::int64_t boundary_hits = 0;
    double empirical = 0.0;
    double analytic = 0.0;
    double tolerance = 0.0;
    bool passed = false;

    static McReport make(std::string label, std::int64_t trials, std::int64_t violations,
                         double analytic, std::int64_t boundary_hits = 0);
};

/// Exact average of the training error over all C(N, m) subsets, as a
/// rational, against the full-sample error rate.
struct UnbiasednessReport {
    std::int64_t subsets = 0;
    // Sum of training errors over all subsets; average = error_sum / (subsets m).
    std::int64_t error_sum = 0;
    std::int64_t full_errors = 0;
    bool equal = false;
};

/// errors holds 0/1 per point; N <= 25.
UnbiasednessReport check_unbiasedness(std::span<const std::int8_t> errors, std::int64_t m);

struct ConcentrationRow {
    double eps = 0.0;
    McReport frequency;  // analytic = exact tail
    double exact_tail = 0.0;
    double hoeffding_kl = 1.0;
    double hoeffding_squared = 1.0;
    double serfling = 1.0;
    double direct = 1.0;
    /// |empirical - exact| within tolerance.
    bool agrees = false;
    /// exact tail below each analytic bound.
    bool dominated = false;
};

/// Frequency of {sample mean - population mean >= eps} for a 0/1 population.
std::vector<ConcentrationRow> mc_concentration(std::span<const std::int8_t> population, std::int64_t m,
                                               const std::vector<double>& eps_grid, std::int64_t trials,
                                               std::uint64_t seed, unsigned threads = 0);

enum class ValidityScenario {
    vapnik_det,           // some h with (R_u - R_m) > eps*(h)
    vapnik_det_relative,  // some h with (R_u - R_m)/sqrt(R_full) > eps*(h), 0/0 = 0
    serfling_det,         // some h with R_u > bound
    direct_det,           // some h with R_u > bound
    gibbs_reduction,      // Gibbs test risk > bound
    gibbs_direct,         // Gibbs test risk > bound
    clustering,           // some (clusterer, tau) with R_u > bound
};

const char* to_string(ValidityScenario scenario);
ValidityScenario parse_validity_scenario(const std::string& name);

struct ClusteringSetup {
    Dataset data;
    std::vector<ClusterAlgorithm> algorithms{ClusterAlgorithm::kmeans};
    std::int64_t c = 10;
    ClusterBound bound = ClusterBound::cor27_exact;
};

/// A fixed full sample: target labels, a finite hypothesis set with its prior,
/// and for the clustering scenario the clustering pipeline.
struct ValidityInstance {
    std::int64_t m = 0;
    Labeling target;
    std::vector<Labeling> hypotheses;
    std::vector<double> prior;
    std::optional<ClusteringSetup> clustering;

    void validate(ValidityScenario scenario) const;
};

/// Target and hypotheses are independent uniform +1/-1 labelings; uniform prior.
ValidityInstance random_labeling_instance(std::int64_t N, std::int64_t m, std::int64_t hypothesis_count,
                                          std::uint64_t seed);

/// 50 points around (0,0) labelled -1 and 50 around (10,0) labelled +1.
Dataset two_blob_dataset();
Labeling two_blob_labels();
/// Even ids of the two-blob dataset.
LabeledSubset two_blob_training();

/// Two-blob full sample with m = 50.
ValidityInstance two_blob_instance(std::int64_t c = 10, ClusterBound bound = ClusterBound::cor27_exact);

/// Gibbs scenarios use the posterior q(h) proportional to p(h) exp(-m R_m(h)).
McReport mc_bound_validity(ValidityScenario scenario, const ValidityInstance& instance, double delta,
                           std::int64_t trials, std::uint64_t seed, unsigned threads = 0);

/// Exact violation fraction over all C(N, m) splits; N <= 20.
McReport exhaustive_bound_validity(ValidityScenario scenario, const ValidityInstance& instance,
                                   double delta);

}  // namespace tbound
