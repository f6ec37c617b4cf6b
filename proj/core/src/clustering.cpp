#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tbound/cluster_transduce.hpp"

namespace tbound {

namespace {

using Point = std::vector<double>;

double squared_distance(const Point& a, const Point& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Renumber clusters in order of first appearance, i.e. by smallest member id.
void canonicalize(std::vector<std::int32_t>& assignment)
{
    std::vector<std::int32_t> relabel;
    for (auto& a : assignment) {
        const auto idx = static_cast<std::size_t>(a);
        if (idx >= relabel.size())
            relabel.resize(idx + 1, -1);
        if (relabel[idx] < 0)
            relabel[idx] = static_cast<std::int32_t>(
                std::count_if(relabel.begin(), relabel.end(), [](std::int32_t r) { return r >= 0; }));
        a = relabel[idx];
    }
}

std::size_t nearest_center(const Point& p, const std::vector<Point>& centers)
{
    std::size_t best = 0;
    double best_d = squared_distance(p, centers[0]);
    for (std::size_t j = 1; j < centers.size(); ++j) {
        const double d = squared_distance(p, centers[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

std::vector<Point> farthest_first_seeds(const Dataset& data, std::size_t tau)
{
    const auto n = static_cast<std::size_t>(data.size());
    Point centroid(data.dim(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < centroid.size(); ++j)
            centroid[j] += data.point(static_cast<std::int64_t>(i))[j];
    for (auto& x : centroid)
        x /= static_cast<double>(n);

    std::size_t first = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = squared_distance(data.point(static_cast<std::int64_t>(i)), centroid);
        if (d < best) {
            best = d;
            first = i;
        }
    }
    std::vector<Point> centers{data.point(static_cast<std::int64_t>(first))};
    std::vector<double> gap(n);
    for (std::size_t i = 0; i < n; ++i)
        gap[i] = squared_distance(data.point(static_cast<std::int64_t>(i)), centers[0]);
    while (centers.size() < tau) {
        const auto next = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
        centers.push_back(data.point(static_cast<std::int64_t>(next)));
        for (std::size_t i = 0; i < n; ++i)
            gap[i] = std::min(gap[i], squared_distance(data.point(static_cast<std::int64_t>(i)), centers.back()));
    }
    return centers;
}

std::vector<std::int32_t> kmeans(const Dataset& data, std::size_t tau)
{
    constexpr int kMaxIterations = 100;
    constexpr double kTolerance = 1e-9;
    const auto n = static_cast<std::size_t>(data.size());
    const std::size_t d = data.dim();
    auto centers = farthest_first_seeds(data, tau);
    std::vector<std::int32_t> assignment(n, 0);

    for (int iter = 0; iter < kMaxIterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i)
            assignment[i] = static_cast<std::int32_t>(nearest_center(data.point(static_cast<std::int64_t>(i)), centers));

        // An empty cluster takes the point farthest from its center in the
        // cluster with the largest squared error.
        while (true) {
            std::vector<std::size_t> count(tau, 0);
            for (auto a : assignment)
                ++count[static_cast<std::size_t>(a)];
            const auto empty = std::find(count.begin(), count.end(), 0u);
            if (empty == count.end())
                break;
            std::vector<double> sse(tau, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                sse[static_cast<std::size_t>(assignment[i])] +=
                    squared_distance(data.point(static_cast<std::int64_t>(i)), centers[static_cast<std::size_t>(assignment[i])]);
            const auto donor = static_cast<std::int32_t>(std::max_element(sse.begin(), sse.end()) - sse.begin());
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (assignment[i] != donor)
                    continue;
                const double dist = squared_distance(data.point(static_cast<std::int64_t>(i)), centers[static_cast<std::size_t>(donor)]);
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            assignment[far] = static_cast<std::int32_t>(empty - count.begin());
            centers[static_cast<std::size_t>(assignment[far])] = data.point(static_cast<std::int64_t>(far));
        }

        std::vector<Point> next(tau, Point(d, 0.0));
        std::vector<double> count(tau, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = static_cast<std::size_t>(assignment[i]);
            count[a] += 1.0;
            for (std::size_t j = 0; j < d; ++j)
                next[a][j] += data.point(static_cast<std::int64_t>(i))[j];
        }
        double moved = 0.0;
        for (std::size_t a = 0; a < tau; ++a) {
            for (auto& x : next[a])
                x /= count[a];
            moved = std::max(moved, std::sqrt(squared_distance(next[a], centers[a])));
        }
        centers = std::move(next);
        if (moved <= kTolerance)
            break;
    }
    return assignment;
}

// Agglomerative clustering with Lance-Williams updates. Slot i always holds
// the cluster whose smallest member is i, so scanning pairs in slot order
// breaks distance ties deterministically. Returns cuts for tau = 1..c.
std::vector<std::vector<std::int32_t>> agglomerate(const Dataset& data, bool single, std::size_t c)
{
    const auto n = static_cast<std::size_t>(data.size());
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] =
                squared_distance(data.point(static_cast<std::int64_t>(i)), data.point(static_cast<std::int64_t>(j)));

    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), 0);
    std::vector<bool> active(n, true);
    std::vector<std::vector<std::int32_t>> cuts(c);
    auto record = [&](std::size_t clusters) {
        if (clusters > c)
            return;
        std::vector<std::int32_t> assignment(n);
        for (std::size_t i = 0; i < n; ++i)
            assignment[i] = static_cast<std::int32_t>(owner[i]);
        canonicalize(assignment);
        cuts[clusters - 1] = std::move(assignment);
    };

    record(n);
    for (std::size_t clusters = n; clusters > 1; --clusters) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i])
                continue;
            for (std::size_t j = i + 1; j < n; ++j) {
                if (active[j] && dist[i][j] < best) {
                    best = dist[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == bi || k == bj)
                continue;
            const double merged = single ? std::min(dist[k][bi], dist[k][bj]) : std::max(dist[k][bi], dist[k][bj]);
            dist[k][bi] = dist[bi][k] = merged;
        }
        active[bj] = false;
        for (auto& o : owner)
            if (o == bj)
                o = bi;
        record(clusters - 1);
    }
    return cuts;
}

}  // namespace

Dataset::Dataset(std::vector<std::vector<double>> points, std::vector<std::int64_t> ids)
{
    require(!points.empty(), "Dataset: needs at least one point");
    require(points.size() == ids.size(), "Dataset: one id per point required");
    const std::size_t d = points.front().size();
    require(d >= 1, "Dataset: dimension must be >= 1");
    points_.resize(points.size());
    std::vector<bool> seen(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
        require(points[i].size() == d, "Dataset: all points must have the same dimension");
        for (double x : points[i])
            require(std::isfinite(x), "Dataset: coordinates must be finite");
        require(ids[i] >= 0 && ids[i] < static_cast<std::int64_t>(points.size()),
                "Dataset: ids must be 0..N-1");
        const auto id = static_cast<std::size_t>(ids[i]);
        require(!seen[id], "Dataset: duplicate id");
        seen[id] = true;
        points_[id] = std::move(points[i]);
    }
}

Dataset::Dataset(std::vector<std::vector<double>> points)
    : Dataset(points, [&] {
          std::vector<std::int64_t> ids(points.size());
          std::iota(ids.begin(), ids.end(), 0);
          return ids;
      }())
{
}

std::int64_t Dataset::distinct_points() const
{
    auto sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    return std::unique(sorted.begin(), sorted.end()) - sorted.begin();
}

const char* to_string(ClusterAlgorithm algorithm)
{
    switch (algorithm) {
    case ClusterAlgorithm::kmeans:
        return "kmeans";
    case ClusterAlgorithm::agglomerative_single:
        return "agglomerative_single";
    case ClusterAlgorithm::agglomerative_complete:
        return "agglomerative_complete";
    }
    return "unknown";
}

ClusterAlgorithm parse_cluster_algorithm(const std::string& name)
{
    for (auto a : {ClusterAlgorithm::kmeans, ClusterAlgorithm::agglomerative_single,
                   ClusterAlgorithm::agglomerative_complete})
        if (name == to_string(a))
            return a;
    throw DomainError("unknown clustering algorithm: " + name);
}

std::vector<Partition> cluster_sweep(const Dataset& data, ClusterAlgorithm algorithm, std::int64_t c,
                                     std::uint64_t /*seed*/, std::int32_t clusterer_id)
{
    require(c >= 1, "cluster_sweep: c must be >= 1");
    require(c <= data.distinct_points(), "cluster_sweep: c exceeds the number of distinct points");
    const auto cu = static_cast<std::size_t>(c);
    std::vector<std::vector<std::int32_t>> cuts;
    if (algorithm == ClusterAlgorithm::kmeans) {
        for (std::size_t tau = 1; tau <= cu; ++tau) {
            auto a = kmeans(data, tau);
            canonicalize(a);
            cuts.push_back(std::move(a));
        }
    } else {
        cuts = agglomerate(data, algorithm == ClusterAlgorithm::agglomerative_single, cu);
    }
    std::vector<Partition> out;
    for (std::size_t i = 0; i < cuts.size(); ++i)
        out.push_back({static_cast<std::int64_t>(i + 1), std::move(cuts[i]), clusterer_id});
    return out;
}

}  // namespace tbound
