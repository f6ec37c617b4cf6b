#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tbound/common.hpp"
#include "tbound/pac_bayes.hpp"

// Cluster-then-label transduction: cluster the full sample at every cluster
// count up to c, label each cluster by the training majority, and keep the
// hypothesis with the smallest risk bound.

namespace tbound {

/// Full sample of points. Rows are stored in id order whatever the order
/// they were supplied in, so results never depend on presentation order.
class Dataset {
public:
    /// ids must be a permutation of 0..N-1.
    Dataset(std::vector<std::vector<double>> points, std::vector<std::int64_t> ids);
    /// Rows get ids 0..N-1 in order.
    explicit Dataset(std::vector<std::vector<double>> points);

    std::int64_t size() const { return static_cast<std::int64_t>(points_.size()); }
    std::size_t dim() const { return points_.front().size(); }
    const std::vector<double>& point(std::int64_t id) const { return points_[static_cast<std::size_t>(id)]; }
    std::int64_t distinct_points() const;

private:
    std::vector<std::vector<double>> points_;
};

/// Training ids with their +1/-1 labels, sorted by id.
struct LabeledSubset {
    std::vector<std::int64_t> indices;
    std::vector<std::int8_t> labels;

    LabeledSubset(std::vector<std::int64_t> indices, std::vector<std::int8_t> labels,
                  std::int64_t population);

    std::int64_t m() const { return static_cast<std::int64_t>(indices.size()); }
    std::int64_t population() const { return population_; }
    /// Ids not in the subset, ascending.
    std::vector<std::int64_t> complement() const;

private:
    std::int64_t population_ = 0;
};

enum class ClusterAlgorithm { kmeans, agglomerative_single, agglomerative_complete };

const char* to_string(ClusterAlgorithm algorithm);
ClusterAlgorithm parse_cluster_algorithm(const std::string& name);

/// assignment[id] in 0..tau-1. Clusters are numbered in order of their
/// smallest member id.
struct Partition {
    std::int64_t tau = 0;
    std::vector<std::int32_t> assignment;
    std::int32_t clusterer_id = 0;
};

/// Partitions for tau = 1..c. The clusterers are deterministic; `seed` is
/// accepted for interface stability and does not affect the result.
std::vector<Partition> cluster_sweep(const Dataset& data, ClusterAlgorithm algorithm,
                                     std::int64_t c, std::uint64_t seed = 0,
                                     std::int32_t clusterer_id = 0);

/// Majority training label per cluster; ties and clusters without training
/// points get +1.
Labeling majority_label(const Partition& partition, const LabeledSubset& labeled);

/// Fraction of training points that h labels differently from their label.
double training_error(const Labeling& h, const LabeledSubset& labeled);

enum class ClusterBound { cor27_printed, cor27_exact, cor23, vapnik_absolute };

const char* to_string(ClusterBound bound);
ClusterBound parse_cluster_bound(const std::string& name);

/// Evaluates one bound for clustering hypotheses under the prior
/// p(h) = 2^-tau / (k c). Critical deviations are cached per tau.
class ClusterBoundEvaluator {
public:
    ClusterBoundEvaluator(ClusterBound bound, std::int64_t c, std::int64_t k_ensemble,
                          std::int64_t m, std::int64_t u, double delta);

    BoundValue operator()(double emp_risk, std::int64_t tau);

private:
    ClusterBound bound_;
    std::int64_t c_, k_, m_, u_;
    double delta_;
    std::map<std::int64_t, double> eps_star_;
};

struct Certificate {
    std::int64_t chosen_tau = 0;
    std::int32_t clusterer_id = 0;
    std::string clusterer_name;
    double emp_risk = 0.0;
    BoundValue bound;
    std::string bound_name;
    double delta = 0.0;
    std::int64_t c = 0;
    std::int64_t k_ensemble = 0;
    std::int64_t m = 0;
    std::int64_t u = 0;
    std::vector<std::int64_t> test_ids;
    std::vector<std::int8_t> predictions;  // aligned with test_ids
};

/// c is the largest tau present and k the number of distinct clusterer ids.
/// Ties go to the smaller tau, then the smaller clusterer id.
Certificate select_by_bound(const std::vector<Partition>& partitions, const LabeledSubset& labeled,
                            double delta, ClusterBound bound,
                            const std::vector<std::string>& clusterer_names = {});

struct TransduceConfig {
    std::vector<ClusterAlgorithm> algorithms{ClusterAlgorithm::kmeans};
    std::int64_t c = 10;
    double delta = 0.05;
    ClusterBound bound = ClusterBound::cor27_exact;
    std::uint64_t seed = 0;
};

/// Clusterer ids are positions in config.algorithms.
Certificate transduce(const Dataset& data, const LabeledSubset& labeled, const TransduceConfig& config);

}  // namespace tbound
