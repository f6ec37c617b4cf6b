#include "tbound/cluster_transduce.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <set>

#include "tbound/exact_hypergeom.hpp"
#include "tbound/prior_forge.hpp"

namespace tbound {

LabeledSubset::LabeledSubset(std::vector<std::int64_t> idx, std::vector<std::int8_t> lab,
                             std::int64_t population)
    : population_(population)
{
    require(idx.size() == lab.size(), "LabeledSubset: one label per index required");
    require(!idx.empty(), "LabeledSubset: needs at least one training point");
    require(static_cast<std::int64_t>(idx.size()) < population, "LabeledSubset: test set is empty");
    std::vector<std::size_t> order(idx.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return idx[a] < idx[b]; });
    for (std::size_t pos : order) {
        require(idx[pos] >= 0 && idx[pos] < population, "LabeledSubset: index outside the dataset");
        require(indices.empty() || indices.back() != idx[pos], "LabeledSubset: duplicate index");
        require(lab[pos] == 1 || lab[pos] == -1, "LabeledSubset: labels must be +1 or -1");
        indices.push_back(idx[pos]);
        labels.push_back(lab[pos]);
    }
}

std::vector<std::int64_t> LabeledSubset::complement() const
{
    std::vector<std::int64_t> out;
    std::size_t j = 0;
    for (std::int64_t id = 0; id < population_; ++id) {
        if (j < indices.size() && indices[j] == id)
            ++j;
        else
            out.push_back(id);
    }
    return out;
}

Labeling majority_label(const Partition& partition, const LabeledSubset& labeled)
{
    require(static_cast<std::int64_t>(partition.assignment.size()) == labeled.population(),
            "majority_label: partition and labels refer to different datasets");
    std::vector<std::int64_t> vote(static_cast<std::size_t>(partition.tau), 0);
    for (std::size_t i = 0; i < labeled.indices.size(); ++i)
        vote[static_cast<std::size_t>(partition.assignment[static_cast<std::size_t>(labeled.indices[i])])] +=
            labeled.labels[i];
    Labeling h(partition.assignment.size());
    for (std::size_t id = 0; id < h.size(); ++id)
        h[id] = vote[static_cast<std::size_t>(partition.assignment[id])] >= 0 ? 1 : -1;
    return h;
}

double training_error(const Labeling& h, const LabeledSubset& labeled)
{
    std::int64_t wrong = 0;
    for (std::size_t i = 0; i < labeled.indices.size(); ++i)
        wrong += h[static_cast<std::size_t>(labeled.indices[i])] != labeled.labels[i];
    return static_cast<double>(wrong) / static_cast<double>(labeled.m());
}

const char* to_string(ClusterBound bound)
{
    switch (bound) {
    case ClusterBound::cor27_printed:
        return "cor27_printed";
    case ClusterBound::cor27_exact:
        return "cor27_exact";
    case ClusterBound::cor23:
        return "cor23";
    case ClusterBound::vapnik_absolute:
        return "vapnik_absolute";
    }
    return "unknown";
}

ClusterBound parse_cluster_bound(const std::string& name)
{
    for (auto b : {ClusterBound::cor27_printed, ClusterBound::cor27_exact, ClusterBound::cor23,
                   ClusterBound::vapnik_absolute})
        if (name == to_string(b))
            return b;
    throw DomainError("unknown clustering bound: " + name);
}

ClusterBoundEvaluator::ClusterBoundEvaluator(ClusterBound bound, std::int64_t c, std::int64_t k,
                                             std::int64_t m, std::int64_t u, double delta)
    : bound_(bound), c_(c), k_(k), m_(m), u_(u), delta_(delta)
{
    require(c >= 1 && k >= 1, "ClusterBoundEvaluator: c and k must be >= 1");
    require(m >= 1 && u >= 1, "ClusterBoundEvaluator: m and u must be >= 1");
    require(c <= m, "ClusterBoundEvaluator: c must not exceed m");
    require(delta > 0.0 && delta < 1.0, "ClusterBoundEvaluator: delta must lie in (0,1)");
}

BoundValue ClusterBoundEvaluator::operator()(double emp_risk, std::int64_t tau)
{
    switch (bound_) {
    case ClusterBound::cor27_printed:
        return clustering_bound(emp_risk, tau, c_, m_, u_, delta_, k_, ClusteringVariant::printed);
    case ClusterBound::cor27_exact:
        return clustering_bound(emp_risk, tau, c_, m_, u_, delta_, k_, ClusteringVariant::exact);
    default:
        break;
    }
    const double mass = std::exp(-clustering_complexity(tau, c_, k_, ClusteringVariant::exact));
    if (bound_ == ClusterBound::cor23) {
        BoundInputs in;
        in.m = m_;
        in.u = u_;
        in.delta = delta_;
        in.emp_risk = emp_risk;
        in.complexity = PriorMass{mass};
        return deterministic_bound(in, DeterministicVariant::direct);
    }
    auto it = eps_star_.find(tau);
    if (it == eps_star_.end())
        it = eps_star_.emplace(tau, critical_deviation(mass, delta_, m_, u_, DeviationKind::absolute).value).first;
    return vapnik_bound(emp_risk, {it->second, DeviationKind::absolute, 0}, m_, u_);
}

Certificate select_by_bound(const std::vector<Partition>& partitions, const LabeledSubset& labeled,
                            double delta, ClusterBound bound,
                            const std::vector<std::string>& clusterer_names)
{
    require(!partitions.empty(), "select_by_bound: no partitions");
    std::int64_t c = 0;
    std::set<std::int32_t> clusterers;
    for (const auto& p : partitions) {
        require(static_cast<std::int64_t>(p.assignment.size()) == labeled.population(),
                "select_by_bound: partitions refer to different datasets");
        c = std::max(c, p.tau);
        clusterers.insert(p.clusterer_id);
    }
    const auto k = static_cast<std::int64_t>(clusterers.size());
    const std::int64_t m = labeled.m();
    const std::int64_t u = labeled.population() - m;
    ClusterBoundEvaluator evaluate(bound, c, k, m, u, delta);

    const Partition* best = nullptr;
    Labeling best_h;
    double best_risk = 0.0;
    BoundValue best_bound;
    for (const auto& p : partitions) {
        auto h = majority_label(p, labeled);
        const double risk = training_error(h, labeled);
        const auto value = evaluate(risk, p.tau);
        const bool better = best == nullptr || value.raw < best_bound.raw ||
                            (value.raw == best_bound.raw &&
                             (p.tau < best->tau || (p.tau == best->tau && p.clusterer_id < best->clusterer_id)));
        if (better) {
            best = &p;
            best_h = std::move(h);
            best_risk = risk;
            best_bound = value;
        }
    }

    Certificate cert;
    cert.chosen_tau = best->tau;
    cert.clusterer_id = best->clusterer_id;
    const auto cid = static_cast<std::size_t>(best->clusterer_id);
    cert.clusterer_name = cid < clusterer_names.size() ? clusterer_names[cid] : std::to_string(best->clusterer_id);
    cert.emp_risk = best_risk;
    cert.bound = best_bound;
    cert.bound_name = to_string(bound);
    cert.delta = delta;
    cert.c = c;
    cert.k_ensemble = k;
    cert.m = m;
    cert.u = u;
    cert.test_ids = labeled.complement();
    for (auto id : cert.test_ids)
        cert.predictions.push_back(best_h[static_cast<std::size_t>(id)]);
    return cert;
}

Certificate transduce(const Dataset& data, const LabeledSubset& labeled, const TransduceConfig& config)
{
    require(!config.algorithms.empty(), "transduce: at least one algorithm required");
    require(labeled.population() == data.size(), "transduce: labels refer to a different dataset");
    require(config.c >= 1 && config.c <= labeled.m(), "transduce: c must lie in [1, m]");

    std::vector<std::future<std::vector<Partition>>> sweeps;
    for (std::size_t i = 0; i < config.algorithms.size(); ++i)
        sweeps.push_back(std::async(std::launch::async, cluster_sweep, std::cref(data), config.algorithms[i],
                                    config.c, config.seed, static_cast<std::int32_t>(i)));
    std::vector<Partition> all;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
        auto part = sweeps[i].get();
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
        names.emplace_back(to_string(config.algorithms[i]));
    }
    return select_by_bound(all, labeled, config.delta, config.bound, names);
}

}  // namespace tbound
