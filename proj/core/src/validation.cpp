#include "tbound/validation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "tbound/concentration.hpp"
#include "tbound/exact_hypergeom.hpp"

namespace tbound {

namespace {

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n)
{
    // Rejection on the low residues keeps the draw unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    while (true) {
        const std::uint64_t x = rng();
        if (x >= threshold)
            return x % n;
    }
}

struct Tally {
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    std::int64_t boundary_hits = 0;

    Tally& operator+=(const Tally& o)
    {
        trials += o.trials;
        violations += o.violations;
        boundary_hits += o.boundary_hits;
        return *this;
    }
};

// Splits [0, trials) into contiguous chunks, one per thread. Counts are
// summed, so the result does not depend on the thread count.
Tally run_parallel(std::int64_t trials, unsigned threads, const std::function<Tally(std::int64_t, std::int64_t)>& work)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::int64_t>(threads, std::max<std::int64_t>(trials, 1)));
    std::vector<Tally> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const std::int64_t begin = trials * t / threads;
        const std::int64_t end = trials * (t + 1) / threads;
        auto job = [&, t, begin, end] {
            try {
                parts[t] = work(begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        };
        if (threads == 1)
            job();
        else
            pool.emplace_back(job);
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    Tally total;
    for (const auto& p : parts)
        total += p;
    return total;
}

// Visits every m-subset of {0..n-1} as a bitmask, n <= 62.
template <class F>
void for_each_subset(int n, int m, F&& visit)
{
    if (m == 0) {
        visit(std::uint64_t{0});
        return;
    }
    std::uint64_t s = (std::uint64_t{1} << m) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (s < limit) {
        visit(s);
        const std::uint64_t c = s & (0 - s);
        const std::uint64_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

struct Outcome {
    bool violated = false;
    bool boundary = false;
};

// Everything a split evaluation needs that does not depend on the split.
class ScenarioContext {
public:
    ScenarioContext(ValidityScenario scenario, const ValidityInstance& instance, double delta)
        : scenario_(scenario), instance_(instance), delta_(delta)
    {
        instance.validate(scenario);
        N_ = static_cast<std::int64_t>(instance.target.size());
        m_ = instance.m;
        u_ = N_ - m_;
        if (scenario == ValidityScenario::clustering) {
            const auto& setup = *instance.clustering;
            for (std::size_t i = 0; i < setup.algorithms.size(); ++i) {
                auto part = cluster_sweep(setup.data, setup.algorithms[i], setup.c, 0, static_cast<std::int32_t>(i));
                partitions_.insert(partitions_.end(), part.begin(), part.end());
            }
            evaluator_.emplace(setup.bound, setup.c, static_cast<std::int64_t>(setup.algorithms.size()), m_, u_,
                               delta);
            // Fill any per-tau caches before the evaluator is copied to threads.
            for (std::int64_t tau = 1; tau <= setup.c; ++tau)
                (*evaluator_)(0.0, tau);
            return;
        }
        for (const auto& h : instance.hypotheses) {
            std::vector<std::int8_t> e(h.size());
            std::int64_t k = 0;
            for (std::size_t i = 0; i < h.size(); ++i) {
                e[i] = h[i] != instance.target[i];
                k += e[i];
            }
            errors_.push_back(std::move(e));
            full_errors_.push_back(k);
        }
        if (scenario == ValidityScenario::vapnik_det || scenario == ValidityScenario::vapnik_det_relative) {
            const auto kind = scenario == ValidityScenario::vapnik_det ? DeviationKind::absolute : DeviationKind::relative;
            std::map<double, double> cache;
            for (double p : instance.prior) {
                auto it = cache.find(p);
                if (it == cache.end())
                    it = cache.emplace(p, critical_deviation(p, delta, m_, u_, kind).value).first;
                eps_star_.push_back(it->second);
            }
        }
    }

    std::int64_t population() const { return N_; }
    std::int64_t m() const { return m_; }
    std::optional<ClusterBoundEvaluator> evaluator() const { return evaluator_; }

    // in_train[i] marks training points.
    Outcome evaluate(const std::vector<char>& in_train, const std::vector<std::int64_t>& train,
                     std::optional<ClusterBoundEvaluator>& evaluator) const
    {
        if (scenario_ == ValidityScenario::clustering)
            return evaluate_clustering(in_train, train, *evaluator);
        const std::size_t H = errors_.size();
        std::vector<std::int64_t> r(H, 0);
        for (std::size_t j = 0; j < H; ++j)
            for (auto i : train)
                r[j] += errors_[j][static_cast<std::size_t>(i)];

        const double md = static_cast<double>(m_);
        const double ud = static_cast<double>(u_);
        Outcome out;
        switch (scenario_) {
        case ValidityScenario::vapnik_det:
        case ValidityScenario::vapnik_det_relative:
            for (std::size_t j = 0; j < H; ++j) {
                const double dev = scenario_ == ValidityScenario::vapnik_det
                                       ? split_deviation(r[j], full_errors_[j], m_, u_)
                                       : scaled_split_deviation(r[j], full_errors_[j], m_, u_);
                out.violated = out.violated || dev > eps_star_[j];
                out.boundary = out.boundary || dev == eps_star_[j];
            }
            out.boundary = out.boundary && !out.violated;
            return out;
        case ValidityScenario::serfling_det:
        case ValidityScenario::direct_det: {
            const auto variant = scenario_ == ValidityScenario::serfling_det ? DeterministicVariant::serfling
                                                                              : DeterministicVariant::direct;
            for (std::size_t j = 0; j < H; ++j) {
                BoundInputs in;
                in.m = m_;
                in.u = u_;
                in.delta = delta_;
                in.emp_risk = static_cast<double>(r[j]) / md;
                in.complexity = PriorMass{instance_.prior[j]};
                const double test = static_cast<double>(full_errors_[j] - r[j]) / ud;
                if (test > deterministic_bound(in, variant).raw)
                    out.violated = true;
            }
            return out;
        }
        case ValidityScenario::gibbs_reduction:
        case ValidityScenario::gibbs_direct: {
            // q_j proportional to p_j exp(-r_j), normalised in log space.
            std::vector<double> logw(H);
            for (std::size_t j = 0; j < H; ++j)
                logw[j] = instance_.prior[j] > 0.0 ? std::log(instance_.prior[j]) - static_cast<double>(r[j])
                                                   : -std::numeric_limits<double>::infinity();
            const double top = *std::max_element(logw.begin(), logw.end());
            double z = 0.0;
            for (double w : logw)
                z += std::exp(w - top);
            double train_risk = 0.0, test_risk = 0.0, kl = 0.0;
            for (std::size_t j = 0; j < H; ++j) {
                const double q = std::exp(logw[j] - top) / z;
                if (q == 0.0)
                    continue;
                train_risk += q * static_cast<double>(r[j]) / md;
                test_risk += q * static_cast<double>(full_errors_[j] - r[j]) / ud;
                kl += q * std::log(q / instance_.prior[j]);
            }
            BoundInputs in;
            in.m = m_;
            in.u = u_;
            in.delta = delta_;
            in.emp_risk = std::clamp(train_risk, 0.0, 1.0);
            in.complexity = KlComplexity{std::max(kl, 0.0)};
            const auto variant =
                scenario_ == ValidityScenario::gibbs_reduction ? GibbsVariant::reduction : GibbsVariant::direct;
            out.violated = test_risk > gibbs_bound(in, variant).raw;
            return out;
        }
        case ValidityScenario::clustering:
            break;
        }
        return out;
    }

private:
    Outcome evaluate_clustering(const std::vector<char>& in_train, const std::vector<std::int64_t>& train,
                                ClusterBoundEvaluator& evaluator) const
    {
        std::vector<std::int8_t> labels;
        for (auto i : train)
            labels.push_back(instance_.target[static_cast<std::size_t>(i)]);
        const LabeledSubset labeled(train, labels, N_);
        Outcome out;
        for (const auto& p : partitions_) {
            const auto h = majority_label(p, labeled);
            std::int64_t wrong_test = 0;
            for (std::int64_t i = 0; i < N_; ++i)
                if (!in_train[static_cast<std::size_t>(i)])
                    wrong_test += h[static_cast<std::size_t>(i)] != instance_.target[static_cast<std::size_t>(i)];
            const double test = static_cast<double>(wrong_test) / static_cast<double>(u_);
            if (test > evaluator(training_error(h, labeled), p.tau).raw)
                out.violated = true;
        }
        return out;
    }

    ValidityScenario scenario_;
    const ValidityInstance& instance_;
    double delta_;
    std::int64_t N_ = 0, m_ = 0, u_ = 0;
    std::vector<std::vector<std::int8_t>> errors_;
    std::vector<std::int64_t> full_errors_;
    std::vector<double> eps_star_;
    std::vector<Partition> partitions_;
    std::optional<ClusterBoundEvaluator> evaluator_;
};

Tally evaluate_into(const ScenarioContext& ctx, const std::vector<std::int64_t>& train,
                    std::optional<ClusterBoundEvaluator>& evaluator)
{
    std::vector<char> in_train(static_cast<std::size_t>(ctx.population()), 0);
    for (auto i : train)
        in_train[static_cast<std::size_t>(i)] = 1;
    const auto o = ctx.evaluate(in_train, train, evaluator);
    return {1, o.violated ? 1 : 0, o.boundary ? 1 : 0};
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t trial_index)
{
    std::uint64_t z = master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SplitSampler::SplitSampler(std::int64_t N_, std::int64_t m_, std::uint64_t seed) : N(N_), m(m_), master_seed(seed)
{
    require(m >= 1 && m < N, "SplitSampler: need 1 <= m < N");
}

std::vector<std::int64_t> sample_split(const SplitSampler& sampler, std::uint64_t trial_index)
{
    std::mt19937_64 rng(mix_seed(sampler.master_seed, trial_index));
    std::vector<std::int64_t> pool(static_cast<std::size_t>(sampler.N));
    std::iota(pool.begin(), pool.end(), 0);
    const auto n = static_cast<std::uint64_t>(sampler.N);
    for (std::uint64_t i = 0; i < static_cast<std::uint64_t>(sampler.m); ++i) {
        const auto j = i + bounded(rng, n - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(sampler.m));
    std::sort(pool.begin(), pool.end());
    return pool;
}

McReport McReport::make(std::string label, std::int64_t trials, std::int64_t violations, double analytic,
                        std::int64_t boundary_hits)
{
    require(trials >= 1, "McReport: trials must be >= 1");
    require(violations >= 0 && violations <= trials, "McReport: violations must lie in [0, trials]");
    McReport r;
    r.label = std::move(label);
    r.trials = trials;
    r.violations = violations;
    r.boundary_hits = boundary_hits;
    r.empirical = static_cast<double>(violations) / static_cast<double>(trials);
    r.analytic = analytic;
    const double p = std::clamp(analytic, 0.0, 1.0);
    r.tolerance = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    r.passed = r.empirical <= r.analytic + r.tolerance;
    return r;
}

UnbiasednessReport check_unbiasedness(std::span<const std::int8_t> errors, std::int64_t m)
{
    const auto n = static_cast<std::int64_t>(errors.size());
    require(n <= 25, "check_unbiasedness: exhaustive mode needs N <= 25; use the Monte-Carlo harness");
    require(m >= 1 && m <= n, "check_unbiasedness: need 1 <= m <= N");
    std::uint64_t error_mask = 0;
    UnbiasednessReport out;
    for (std::int64_t i = 0; i < n; ++i) {
        require(errors[static_cast<std::size_t>(i)] == 0 || errors[static_cast<std::size_t>(i)] == 1,
                "check_unbiasedness: errors must be 0 or 1");
        if (errors[static_cast<std::size_t>(i)]) {
            error_mask |= std::uint64_t{1} << i;
            ++out.full_errors;
        }
    }
    for_each_subset(static_cast<int>(n), static_cast<int>(m), [&](std::uint64_t s) {
        ++out.subsets;
        out.error_sum += std::popcount(s & error_mask);
    });
    // error_sum / (subsets m) == full_errors / N, cross-multiplied.
    out.equal = static_cast<int128>(out.error_sum) * n ==
                static_cast<int128>(out.full_errors) * out.subsets * m;
    return out;
}

std::vector<ConcentrationRow> mc_concentration(std::span<const std::int8_t> population, std::int64_t m,
                                               const std::vector<double>& eps_grid, std::int64_t trials,
                                               std::uint64_t seed, unsigned threads)
{
    const auto n = static_cast<std::int64_t>(population.size());
    require(trials >= 1000, "mc_concentration: trials must be >= 1000");
    require(m >= 1 && m < n, "mc_concentration: need 1 <= m < N");
    std::int64_t ones = 0;
    for (auto v : population) {
        require(v == 0 || v == 1, "mc_concentration: population must be 0/1");
        ones += v;
    }
    for (double e : eps_grid)
        require(e >= 0.0, "mc_concentration: eps must be >= 0");

    // Deviation of the sample mean for r sampled ones; one rounding step, so
    // the Monte-Carlo event and the exact tail use identical thresholds.
    auto deviation = [&](std::int64_t r) {
        return static_cast<double>(r * n - ones * m) / static_cast<double>(m * n);
    };
    const HypergeomSpec spec{m, n - m, ones};
    const SplitSampler sampler(n, m, seed);

    // Histogram of r over all trials, then every eps reads from it.
    std::vector<std::int64_t> hist(static_cast<std::size_t>(m + 1), 0);
    {
        unsigned t = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
        t = static_cast<unsigned>(std::min<std::int64_t>(t, trials));
        std::vector<std::vector<std::int64_t>> parts(t, hist);
        std::vector<std::thread> pool;
        auto job = [&](unsigned w) {
            for (std::int64_t i = trials * w / t; i < trials * (w + 1) / t; ++i) {
                std::int64_t r = 0;
                for (auto idx : sample_split(sampler, static_cast<std::uint64_t>(i)))
                    r += population[static_cast<std::size_t>(idx)];
                ++parts[w][static_cast<std::size_t>(r)];
            }
        };
        for (unsigned w = 1; w < t; ++w)
            pool.emplace_back(job, w);
        job(0);
        for (auto& th : pool)
            th.join();
        for (const auto& p : parts)
            for (std::size_t r = 0; r < hist.size(); ++r)
                hist[r] += p[r];
    }

    const auto pop = PopulationSummary::binary_population(n, ones);
    std::vector<ConcentrationRow> rows;
    for (double eps : eps_grid) {
        std::int64_t r0 = spec.r_max() + 1;
        while (r0 - 1 >= spec.r_min() && deviation(r0 - 1) >= eps)
            --r0;
        std::int64_t hits = 0;
        for (std::int64_t r = std::max<std::int64_t>(r0, 0); r <= m; ++r)
            hits += hist[static_cast<std::size_t>(r)];
        ConcentrationRow row;
        row.eps = eps;
        row.exact_tail = upper_tail_mass(r0, spec);
        row.frequency = McReport::make("eps=" + std::to_string(eps), trials, hits, row.exact_tail);
        const DeviationQuery q{m, eps};
        row.hoeffding_kl = hoeffding_bound(pop, q, HoeffdingForm::kl).value;
        row.hoeffding_squared = hoeffding_bound(pop, q, HoeffdingForm::squared).value;
        row.serfling = serfling_bound(pop, q).value;
        row.direct = direct_binary_bound(pop, q).value;
        row.agrees = std::abs(row.frequency.empirical - row.exact_tail) <= row.frequency.tolerance;
        row.dominated = row.exact_tail <= std::min({row.hoeffding_kl, row.hoeffding_squared, row.serfling, row.direct});
        rows.push_back(row);
    }
    return rows;
}

const char* to_string(ValidityScenario scenario)
{
    switch (scenario) {
    case ValidityScenario::vapnik_det:
        return "vapnik_det";
    case ValidityScenario::vapnik_det_relative:
        return "vapnik_det_relative";
    case ValidityScenario::serfling_det:
        return "serfling_det";
    case ValidityScenario::direct_det:
        return "cor23";
    case ValidityScenario::gibbs_reduction:
        return "gibbs_reduction";
    case ValidityScenario::gibbs_direct:
        return "gibbs_direct";
    case ValidityScenario::clustering:
        return "clustering";
    }
    return "unknown";
}

ValidityScenario parse_validity_scenario(const std::string& name)
{
    if (name == "direct_det")
        return ValidityScenario::direct_det;
    for (auto s : {ValidityScenario::vapnik_det, ValidityScenario::vapnik_det_relative, ValidityScenario::serfling_det,
                   ValidityScenario::direct_det, ValidityScenario::gibbs_reduction, ValidityScenario::gibbs_direct,
                   ValidityScenario::clustering})
        if (name == to_string(s))
            return s;
    throw DomainError("unknown validation scenario: " + name);
}

void ValidityInstance::validate(ValidityScenario scenario) const
{
    const auto n = static_cast<std::int64_t>(target.size());
    require(m >= 1 && m < n, "ValidityInstance: need 1 <= m < N");
    for (auto y : target)
        require(y == 1 || y == -1, "ValidityInstance: target labels must be +1 or -1");
    if (scenario == ValidityScenario::clustering) {
        require(clustering.has_value(), "ValidityInstance: clustering scenario needs a clustering setup");
        require(clustering->data.size() == n, "ValidityInstance: dataset and target sizes differ");
        require(!clustering->algorithms.empty(), "ValidityInstance: no clustering algorithm");
        return;
    }
    require(!hypotheses.empty(), "ValidityInstance: empty hypothesis set");
    require(prior.size() == hypotheses.size(), "ValidityInstance: one prior weight per hypothesis");
    double total = 0.0;
    for (std::size_t j = 0; j < hypotheses.size(); ++j) {
        require(static_cast<std::int64_t>(hypotheses[j].size()) == n, "ValidityInstance: hypothesis size mismatch");
        require(prior[j] > 0.0 && prior[j] <= 1.0, "ValidityInstance: prior weights must lie in (0,1]");
        total += prior[j];
    }
    require(total <= 1.0 + 1e-12, "ValidityInstance: prior weights sum above 1");
}

ValidityInstance random_labeling_instance(std::int64_t N, std::int64_t m, std::int64_t hypothesis_count,
                                          std::uint64_t seed)
{
    require(N >= 2 && hypothesis_count >= 1, "random_labeling_instance: need N >= 2 and at least one hypothesis");
    std::mt19937_64 rng(mix_seed(seed, 0));
    auto draw = [&] {
        Labeling h(static_cast<std::size_t>(N));
        for (auto& y : h)
            y = (rng() >> 63) ? 1 : -1;
        return h;
    };
    ValidityInstance inst;
    inst.m = m;
    inst.target = draw();
    for (std::int64_t j = 0; j < hypothesis_count; ++j)
        inst.hypotheses.push_back(draw());
    inst.prior.assign(static_cast<std::size_t>(hypothesis_count), 1.0 / static_cast<double>(hypothesis_count));
    return inst;
}

Dataset two_blob_dataset()
{
    constexpr double kGoldenAngle = 2.399963229728653;
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 100; ++i) {
        const int j = i % 50;
        const double cx = i < 50 ? 0.0 : 10.0;
        const double radius = 0.2 + 0.8 * static_cast<double>((j * 7) % 50) / 49.0;
        const double angle = kGoldenAngle * j;
        points.push_back({cx + radius * std::cos(angle), radius * std::sin(angle)});
    }
    return Dataset(std::move(points));
}

Labeling two_blob_labels()
{
    Labeling y(100);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = i < 50 ? -1 : 1;
    return y;
}

LabeledSubset two_blob_training()
{
    const auto y = two_blob_labels();
    std::vector<std::int64_t> idx;
    std::vector<std::int8_t> lab;
    for (std::int64_t i = 0; i < 100; i += 2) {
        idx.push_back(i);
        lab.push_back(y[static_cast<std::size_t>(i)]);
    }
    return LabeledSubset(idx, lab, 100);
}

ValidityInstance two_blob_instance(std::int64_t c, ClusterBound bound)
{
    ValidityInstance inst;
    inst.m = 50;
    inst.target = two_blob_labels();
    inst.clustering = ClusteringSetup{two_blob_dataset(), {ClusterAlgorithm::kmeans}, c, bound};
    return inst;
}

McReport mc_bound_validity(ValidityScenario scenario, const ValidityInstance& instance, double delta,
                           std::int64_t trials, std::uint64_t seed, unsigned threads)
{
    require(trials >= 1, "mc_bound_validity: trials must be >= 1");
    require(delta > 0.0 && delta < 1.0, "mc_bound_validity: delta must lie in (0,1)");
    const ScenarioContext ctx(scenario, instance, delta);
    const SplitSampler sampler(ctx.population(), ctx.m(), seed);
    const auto total = run_parallel(trials, threads, [&](std::int64_t begin, std::int64_t end) {
        auto evaluator = ctx.evaluator();
        Tally t;
        for (std::int64_t i = begin; i < end; ++i)
            t += evaluate_into(ctx, sample_split(sampler, static_cast<std::uint64_t>(i)), evaluator);
        return t;
    });
    return McReport::make(to_string(scenario), total.trials, total.violations, delta, total.boundary_hits);
}

McReport exhaustive_bound_validity(ValidityScenario scenario, const ValidityInstance& instance, double delta)
{
    require(delta > 0.0 && delta < 1.0, "exhaustive_bound_validity: delta must lie in (0,1)");
    const ScenarioContext ctx(scenario, instance, delta);
    require(ctx.population() <= 20, "exhaustive_bound_validity: needs N <= 20");
    auto evaluator = ctx.evaluator();
    Tally total;
    for_each_subset(static_cast<int>(ctx.population()), static_cast<int>(ctx.m()), [&](std::uint64_t s) {
        std::vector<std::int64_t> train;
        for (int i = 0; i < 64; ++i)
            if (s >> i & 1)
                train.push_back(i);
        total += evaluate_into(ctx, train, evaluator);
    });
    return McReport::make(to_string(scenario), total.trials, total.violations, delta, total.boundary_hits);
}

}  // namespace tbound
