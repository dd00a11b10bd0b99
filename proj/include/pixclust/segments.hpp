#ifndef PIXCLUST_SEGMENTS_HPP
#define PIXCLUST_SEGMENTS_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "pixclust/clustering.hpp"
#include "pixclust/core.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/image.hpp"
#include "pixclust/sequence.hpp"

/**
 * @file segments.hpp
 * @brief Connected segments of a partition and the operations that change their number.
 *
 * A segment is a maximal 4-connected set of pixels sharing a cluster label.
 * Segment reduction moves whole segments between clusters by the correction
 * increment; connected merging joins adjacent segments by the merge increment.
 */

namespace pixclust {

using SegmentId = std::uint32_t;

struct Segment {
    ClusterStats stats;
    Label cluster = 0;
    /// 4-adjacent segments, ascending.
    std::vector<SegmentId> neighbors;
};

struct SegmentMap {
    std::vector<SegmentId> segment_labels;
    std::vector<Segment> segments;

    std::size_t segment_count() const { return segments.size(); }
};

namespace detail {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n = 0) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }

    std::uint32_t add() {
        parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
        return parent_.back();
    }

    std::uint32_t find(std::uint32_t x) {
        std::uint32_t root = x;
        while (parent_[root] != root) {
            root = parent_[root];
        }
        while (parent_[x] != root) {
            const std::uint32_t next = parent_[x];
            parent_[x] = root;
            x = next;
        }
        return root;
    }

    /// Attaches the larger root under the smaller one.
    std::uint32_t unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return a;
        }
        if (b < a) {
            std::swap(a, b);
        }
        parent_[b] = a;
        return a;
    }

private:
    std::vector<std::uint32_t> parent_;
};

/// Two-pass 4-connected labeling; ids follow the raster order of each component's first pixel.
template <typename L>
std::pair<std::vector<SegmentId>, std::size_t> connected_components(std::uint32_t width, std::uint32_t height,
                                                                     std::span<const L> labels) {
    const std::size_t n = std::size_t{width} * height;
    std::vector<std::uint32_t> provisional(n);
    DisjointSet sets;
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            const std::size_t i = std::size_t{y} * width + x;
            const bool join_left = x > 0 && labels[i - 1] == labels[i];
            const bool join_up = y > 0 && labels[i - width] == labels[i];
            if (join_left && join_up) {
                provisional[i] = sets.unite(provisional[i - 1], provisional[i - width]);
            } else if (join_left) {
                provisional[i] = provisional[i - 1];
            } else if (join_up) {
                provisional[i] = provisional[i - width];
            } else {
                provisional[i] = sets.add();
            }
        }
    }
    constexpr SegmentId unset = std::numeric_limits<SegmentId>::max();
    std::vector<SegmentId> remap(n, unset);
    std::vector<SegmentId> out(n);
    SegmentId next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t root = sets.find(provisional[i]);
        if (remap[root] == unset) {
            remap[root] = next++;
        }
        out[i] = remap[root];
    }
    return {std::move(out), next};
}

/// Sorted, deduplicated adjacency lists of a segment labeling.
inline std::vector<std::vector<SegmentId>> segment_adjacency(std::uint32_t width, std::uint32_t height,
                                                             std::span<const SegmentId> seg, std::size_t count) {
    std::vector<std::vector<SegmentId>> adj(count);
    for (std::uint32_t y = 0; y < height; ++y) {
        for (std::uint32_t x = 0; x < width; ++x) {
            const std::size_t i = std::size_t{y} * width + x;
            if (x + 1 < width && seg[i] != seg[i + 1]) {
                adj[seg[i]].push_back(seg[i + 1]);
                adj[seg[i + 1]].push_back(seg[i]);
            }
            if (y + 1 < height && seg[i] != seg[i + width]) {
                adj[seg[i]].push_back(seg[i + width]);
                adj[seg[i + width]].push_back(seg[i]);
            }
        }
    }
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    return adj;
}

/**
 * Region adjacency graph under merging. A merged region keeps the smaller of
 * the two ids; absorbed ids are tracked in a disjoint set for relabeling pixels.
 */
class RegionGraph {
public:
    struct Region {
        ClusterStats stats;
        Label cluster = 0;
        std::set<SegmentId> neighbors;
        bool alive = true;
    };

    explicit RegionGraph(const SegmentMap& map) : sets_(map.segments.size()) {
        regions_.reserve(map.segments.size());
        for (const auto& s : map.segments) {
            regions_.push_back({s.stats, s.cluster, std::set<SegmentId>(s.neighbors.begin(), s.neighbors.end()), true});
        }
        alive_count_ = regions_.size();
    }

    std::size_t size() const { return regions_.size(); }
    std::size_t alive_count() const { return alive_count_; }
    const Region& region(SegmentId id) const { return regions_[id]; }
    Region& region(SegmentId id) { return regions_[id]; }

    /// Merges two regions; returns the survivor.
    SegmentId merge(SegmentId a, SegmentId b) {
        const SegmentId keep = std::min(a, b);
        const SegmentId gone = std::max(a, b);
        Region& k = regions_[keep];
        Region& g = regions_[gone];
        k.stats = merge_stats(k.stats, g.stats);
        k.neighbors.erase(gone);
        g.neighbors.erase(keep);
        for (const SegmentId nb : g.neighbors) {
            auto& nn = regions_[nb].neighbors;
            nn.erase(gone);
            nn.insert(keep);
            k.neighbors.insert(nb);
        }
        g.neighbors.clear();
        g.alive = false;
        sets_.unite(keep, gone);
        --alive_count_;
        return keep;
    }

    SegmentId find(SegmentId id) { return sets_.find(id); }

    /// Pixel labels of the current cluster assignment.
    std::vector<Label> pixel_clusters(std::span<const SegmentId> initial_segments) {
        std::vector<Label> out(initial_segments.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = regions_[find(initial_segments[i])].cluster;
        }
        return out;
    }

private:
    std::vector<Region> regions_;
    DisjointSet sets_;
    std::size_t alive_count_ = 0;
};

/// Segment mean rounded half-up to the intensity grid.
inline std::uint64_t rounded_mean(const ClusterStats& s) { return (2 * s.sum + s.n) / (2 * s.n); }

} // namespace detail

inline SegmentMap label_segments(const Partition& p, const Image& image) {
    const auto& labels = p.labels();
    if (labels.size() != image.size()) {
        throw std::invalid_argument("label_segments: partition does not cover the image");
    }
    auto [seg, count] = detail::connected_components<Label>(image.width, image.height, labels);
    SegmentMap out;
    out.segments.resize(count);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        Segment& s = out.segments[seg[i]];
        s.stats = merge_stats(s.stats, ClusterStats::of_value(image.pixels[i]));
        s.cluster = labels[i];
    }
    auto adj = detail::segment_adjacency(image.width, image.height, seg, count);
    for (std::size_t s = 0; s < count; ++s) {
        out.segments[s].neighbors = std::move(adj[s]);
    }
    out.segment_labels = std::move(seg);
    return out;
}

struct StoppingCondition {
    enum class Kind { OneSegmentPerCluster, UniqueSegmentMeans, TargetSegmentCount };

    Kind kind = Kind::OneSegmentPerCluster;
    std::size_t target = 0;

    static StoppingCondition one_segment() { return {Kind::OneSegmentPerCluster, 0}; }
    static StoppingCondition unique_means() { return {Kind::UniqueSegmentMeans, 0}; }
    static StoppingCondition target_count(std::size_t m) { return {Kind::TargetSegmentCount, m}; }

    std::string name() const {
        switch (kind) {
        case Kind::OneSegmentPerCluster:
            return "one-segment";
        case Kind::UniqueSegmentMeans:
            return "unique-means";
        case Kind::TargetSegmentCount:
            return "target=" + std::to_string(target);
        }
        return "";
    }
};

struct SegmentMove {
    SegmentId segment = 0;
    Label donor = 0;
    Label acceptor = 0;
    ClusterStats moved;
    double delta = 0.0;
};

struct ReductionOptions {
    /// When set, only these clusters may give or receive segments.
    std::optional<std::pair<Label, Label>> scope;
    /// Called after every move with the pixel labels it produced.
    std::function<void(const SegmentMove&, const std::vector<Label>&)> observer;
};

struct ReductionResult {
    Partition partition;
    SegmentMap segments;
    std::vector<SegmentMove> moves;
    /// Whether the stopping condition holds on the output.
    bool satisfied = false;
};

/**
 * Reduces the number of segments by moving whole segments from their cluster
 * (donor) to the cluster of an adjacent segment (acceptor), always taking the
 * move with the smallest correction increment, until the stopping condition
 * holds or no eligible move remains. Donor clusters are never emptied, so g is
 * preserved.
 */
inline ReductionResult reduce_segments(const Partition& p, const Image& image, const StoppingCondition& stop,
                                       const ReductionOptions& options = {}) {
    if (stop.kind == StoppingCondition::Kind::TargetSegmentCount && stop.target < p.g()) {
        throw std::invalid_argument("reduce_segments: target segment count " + std::to_string(stop.target) +
                                    " is below the cluster count " + std::to_string(p.g()));
    }
    const SegmentMap initial = label_segments(p, image);
    detail::RegionGraph graph(initial);
    std::vector<ClusterStats> clusters = p.clusters();
    const std::size_t g = clusters.size();

    auto in_scope = [&](Label c) {
        return !options.scope || c == options.scope->first || c == options.scope->second;
    };

    std::vector<std::size_t> cluster_segments(g, 0);
    std::map<std::uint64_t, std::size_t> mean_counts;
    std::vector<SegmentId> candidates;
    for (SegmentId s = 0; s < graph.size(); ++s) {
        const auto& r = graph.region(s);
        ++cluster_segments[r.cluster];
        ++mean_counts[detail::rounded_mean(r.stats)];
        if (in_scope(r.cluster)) {
            candidates.push_back(s);
        }
    }

    auto satisfied = [&]() {
        switch (stop.kind) {
        case StoppingCondition::Kind::OneSegmentPerCluster:
            return std::all_of(cluster_segments.begin(), cluster_segments.end(),
                               [](std::size_t c) { return c == 1; });
        case StoppingCondition::Kind::UniqueSegmentMeans:
            return std::all_of(mean_counts.begin(), mean_counts.end(), [](const auto& kv) { return kv.second <= 1; });
        case StoppingCondition::Kind::TargetSegmentCount:
            return graph.alive_count() <= stop.target;
        }
        return true;
    };

    std::vector<SegmentMove> moves;
    std::vector<SegmentId> anchor(g);
    while (!satisfied()) {
        std::erase_if(candidates, [&](SegmentId s) { return !graph.region(s).alive; });
        if (stop.kind == StoppingCondition::Kind::OneSegmentPerCluster) {
            // the largest segment of each cluster stays put
            std::vector<std::uint64_t> best_n(g, 0);
            for (const SegmentId s : candidates) {
                const auto& r = graph.region(s);
                if (r.stats.n > best_n[r.cluster]) {
                    best_n[r.cluster] = r.stats.n;
                    anchor[r.cluster] = s;
                }
            }
        }
        auto eligible = [&](SegmentId s, const detail::RegionGraph::Region& r) {
            switch (stop.kind) {
            case StoppingCondition::Kind::OneSegmentPerCluster:
                return cluster_segments[r.cluster] >= 2 && anchor[r.cluster] != s;
            case StoppingCondition::Kind::UniqueSegmentMeans:
                return mean_counts.at(detail::rounded_mean(r.stats)) >= 2;
            case StoppingCondition::Kind::TargetSegmentCount:
                return true;
            }
            return false;
        };

        std::optional<SegmentMove> best;
        for (const SegmentId s : candidates) {
            const auto& r = graph.region(s);
            const ClusterStats& donor = clusters[r.cluster];
            if (r.stats.n >= donor.n || !eligible(s, r)) {
                continue;
            }
            Label last_acceptor = r.cluster;
            for (const SegmentId nb : r.neighbors) {
                const Label acceptor = graph.region(nb).cluster;
                if (acceptor == last_acceptor || !in_scope(acceptor)) {
                    continue;
                }
                last_acceptor = acceptor;
                const double delta = delta_e_correct(donor, r.stats, clusters[acceptor]);
                if (!best || std::tie(delta, s, acceptor) < std::tie(best->delta, best->segment, best->acceptor)) {
                    best = SegmentMove{s, r.cluster, acceptor, r.stats, delta};
                }
            }
        }
        if (!best) {
            break;
        }

        const SegmentMove mv = *best;
        clusters[mv.donor] = remove_stats(clusters[mv.donor], mv.moved);
        clusters[mv.acceptor] = merge_stats(clusters[mv.acceptor], mv.moved);
        --cluster_segments[mv.donor];
        auto drop_mean = [&](const ClusterStats& st) {
            auto it = mean_counts.find(detail::rounded_mean(st));
            if (--it->second == 0) {
                mean_counts.erase(it);
            }
        };
        drop_mean(mv.moved);
        graph.region(mv.segment).cluster = mv.acceptor;
        // the moved segment fuses with every adjacent segment of the acceptor
        std::vector<SegmentId> absorb;
        for (const SegmentId nb : graph.region(mv.segment).neighbors) {
            if (graph.region(nb).cluster == mv.acceptor) {
                absorb.push_back(nb);
            }
        }
        SegmentId survivor = mv.segment;
        for (const SegmentId nb : absorb) {
            drop_mean(graph.region(nb).stats);
            survivor = graph.merge(survivor, nb);
        }
        cluster_segments[mv.acceptor] -= absorb.size() - 1;
        ++mean_counts[detail::rounded_mean(graph.region(survivor).stats)];
        if (in_scope(mv.acceptor) &&
            std::find(candidates.begin(), candidates.end(), survivor) == candidates.end()) {
            candidates.push_back(survivor);
        }
        moves.push_back(mv);
        if (options.observer) {
            options.observer(mv, graph.pixel_clusters(initial.segment_labels));
        }
    }

    ReductionResult out;
    out.satisfied = satisfied();
    out.partition = Partition(image, graph.pixel_clusters(initial.segment_labels));
    out.segments = label_segments(out.partition, image);
    out.moves = std::move(moves);
    return out;
}

namespace detail {

struct ClusterSplitPlan {
    bool splittable = false;
    double delta = 0.0;
    std::uint32_t threshold = 0;
    Intensity min_level = 0;
};

inline ClusterSplitPlan plan_cluster_split(const Histogram& h) {
    ClusterSplitPlan plan;
    if (h.populated().empty()) {
        return plan;
    }
    plan.min_level = h.populated().front();
    if (h.populated().size() < 2) {
        return plan;
    }
    const BinarySplit s = best_binary_split(h);
    plan.splittable = true;
    plan.delta = s.delta;
    plan.threshold = s.threshold;
    return plan;
}

} // namespace detail

/**
 * Top-down dichotomous splitting in which every split is followed by segment
 * reduction between the two new subclusters. Each cluster is split by the
 * Otsu threshold of its own histogram; the cluster with the largest decrease
 * of E goes first.
 */
class ReducedSplitter {
public:
    ReducedSplitter(const Image& image, StoppingCondition stop)
        : image_(&image), stop_(stop), partition_(Partition::single(image)) {
        if (stop_.kind == StoppingCondition::Kind::TargetSegmentCount) {
            throw std::invalid_argument("interleaved reduction supports one-segment and unique-means stopping");
        }
        plans_.push_back(detail::plan_cluster_split(Histogram(image.levels, image.pixels)));
        segments_ = label_segments(partition_, image).segment_count();
    }

    const Partition& partition() const { return partition_; }
    std::size_t g() const { return partition_.g(); }
    std::size_t segment_count() const { return segments_; }

    /// Splits one more cluster; false when every cluster is uniform.
    bool step(const ReductionOptions& extra = {}) {
        std::optional<Label> pick;
        for (Label c = 0; c < plans_.size(); ++c) {
            const auto& pl = plans_[c];
            if (!pl.splittable) {
                continue;
            }
            if (!pick || std::tie(pl.delta, pl.min_level, c) <
                             std::tie(plans_[*pick].delta, plans_[*pick].min_level, *pick)) {
                pick = c;
            }
        }
        if (!pick) {
            return false;
        }
        const Label parent = *pick;
        const Label fresh = static_cast<Label>(partition_.g());
        std::vector<Label> labels = partition_.labels();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == parent && image_->pixels[i] >= plans_[parent].threshold) {
                labels[i] = fresh;
            }
        }
        Partition split(*image_, std::move(labels));
        ReductionOptions opts;
        opts.scope = std::make_pair(parent, fresh);
        opts.observer = extra.observer;
        ReductionResult reduced = reduce_segments(split, *image_, stop_, opts);
        partition_ = std::move(reduced.partition);
        segments_ = reduced.segments.segment_count();
        moves_ += reduced.moves.size();

        std::vector<std::uint64_t> cp(image_->levels, 0);
        std::vector<std::uint64_t> cf(image_->levels, 0);
        for (std::size_t i = 0; i < partition_.labels().size(); ++i) {
            const Label l = partition_.labels()[i];
            if (l == parent) {
                ++cp[image_->pixels[i]];
            } else if (l == fresh) {
                ++cf[image_->pixels[i]];
            }
        }
        plans_[parent] = detail::plan_cluster_split(Histogram::from_counts(std::move(cp)));
        plans_.push_back(detail::plan_cluster_split(Histogram::from_counts(std::move(cf))));
        return true;
    }

    std::size_t moves() const { return moves_; }

private:
    const Image* image_;
    StoppingCondition stop_;
    Partition partition_;
    std::vector<detail::ClusterSplitPlan> plans_;
    std::size_t segments_ = 0;
    std::size_t moves_ = 0;
};

/// Records (g, E, σ, segment count) of the interleaved split-and-reduce pipeline.
inline ApproximationSequence reduced_sequence(const Image& image, std::size_t g_max, const StoppingCondition& stop) {
    if (g_max < 1) {
        throw std::invalid_argument("reduced_sequence: g_max must be at least 1");
    }
    ApproximationSequence seq(image.size());
    ReducedSplitter splitter(image, stop);
    seq.push(1, splitter.partition().total_error(), splitter.segment_count());
    while (splitter.g() < g_max && splitter.step()) {
        seq.push(splitter.g(), splitter.partition().total_error(), splitter.segment_count());
    }
    if (splitter.g() < g_max) {
        seq.warning = "every cluster is uniform at g = " + std::to_string(splitter.g());
    }
    return seq;
}

inline Partition reduced_partition(const Image& image, std::size_t g, const StoppingCondition& stop) {
    ReducedSplitter splitter(image, stop);
    while (splitter.g() < g) {
        if (!splitter.step()) {
            throw std::out_of_range("reduced_partition: g = " + std::to_string(g) + " is not reachable");
        }
    }
    return splitter.partition();
}

/// Global reduction applied afterwards to each partition of the top-down quasioptimal sequence.
inline ApproximationSequence reduced_sequence_post_pass(const Image& image, std::size_t g_max,
                                                        const StoppingCondition& stop) {
    const Dendrogram d = build_compact_representation(image);
    ApproximationSequence seq(image.size());
    ExpansionCursor cursor(d);
    while (true) {
        const Partition p(image, labels_from_levels(image, cursor.level_labels()));
        const StoppingCondition s =
            stop.kind == StoppingCondition::Kind::TargetSegmentCount && stop.target < p.g()
                ? StoppingCondition::target_count(p.g())
                : stop;
        const ReductionResult r = reduce_segments(p, image, s);
        seq.push(cursor.g(), r.partition.total_error(), r.segments.segment_count());
        if (cursor.g() >= g_max || cursor.done()) {
            break;
        }
        cursor.step();
    }
    if (cursor.g() < g_max) {
        seq.warning = "hierarchy exhausted at g = " + std::to_string(cursor.g());
    }
    return seq;
}

namespace detail {

/// Greedy adjacent-segment merging starting from constant-intensity segments.
class ConnectedMerger {
public:
    explicit ConnectedMerger(const Image& image) : image_(&image) {
        std::vector<Label> by_value(image.pixels.begin(), image.pixels.end());
        auto [seg, count] = connected_components<Label>(image.width, image.height, by_value);
        SegmentMap map;
        map.segments.resize(count);
        for (std::size_t i = 0; i < seg.size(); ++i) {
            auto& s = map.segments[seg[i]];
            s.stats = merge_stats(s.stats, ClusterStats::of_value(image.pixels[i]));
            s.cluster = static_cast<Label>(seg[i]);
        }
        auto adj = segment_adjacency(image.width, image.height, seg, count);
        for (std::size_t s = 0; s < count; ++s) {
            map.segments[s].neighbors = std::move(adj[s]);
        }
        initial_ = std::move(seg);
        graph_.emplace(map);
        version_.assign(count, 0);
        for (SegmentId s = 0; s < count; ++s) {
            for (const SegmentId nb : graph_->region(s).neighbors) {
                if (s < nb) {
                    offer(s, nb);
                }
            }
        }
    }

    std::size_t count() const { return graph_->alive_count(); }
    double error() const { return static_cast<double>(E_); }

    /// Merges the adjacent pair with the smallest increment; false when one segment remains.
    bool step() {
        while (!heap_.empty()) {
            const auto [delta, a, b, va, vb] = heap_.top();
            heap_.pop();
            if (!graph_->region(a).alive || !graph_->region(b).alive || version_[a] != va || version_[b] != vb) {
                continue;
            }
            const SegmentId keep = graph_->merge(a, b);
            ++version_[keep];
            E_ += delta;
            for (const SegmentId nb : graph_->region(keep).neighbors) {
                offer(std::min(keep, nb), std::max(keep, nb));
            }
            return true;
        }
        return false;
    }

    /// Partition whose clusters are the current segments.
    Partition partition() {
        std::vector<Label> roots(initial_.size());
        std::map<SegmentId, Label> dense;
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const SegmentId r = graph_->find(initial_[i]);
            const auto it = dense.try_emplace(r, static_cast<Label>(dense.size())).first;
            roots[i] = it->second;
        }
        return Partition(*image_, std::move(roots));
    }

private:
    using Entry = std::tuple<double, SegmentId, SegmentId, std::uint32_t, std::uint32_t>;

    void offer(SegmentId a, SegmentId b) {
        heap_.emplace(delta_e_merge(graph_->region(a).stats, graph_->region(b).stats), a, b, version_[a],
                      version_[b]);
    }

    const Image* image_;
    std::vector<SegmentId> initial_;
    std::optional<RegionGraph> graph_;
    std::vector<std::uint32_t> version_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap_;
    long double E_ = 0.0L;
};

} // namespace detail

/**
 * Greedy merging of adjacent connected segments by the smallest merge
 * increment, from the maximal constant-intensity segments down to `g_min`
 * segments. Records are kept for segment counts up to `g_record_max`.
 */
inline ApproximationSequence merge_connected_segments(const Image& image, std::size_t g_min,
                                                      std::size_t g_record_max = std::numeric_limits<std::size_t>::max()) {
    if (g_min < 1) {
        throw std::invalid_argument("merge_connected_segments: g_min must be at least 1");
    }
    detail::ConnectedMerger merger(image);
    std::vector<std::pair<std::size_t, double>> trail;
    if (merger.count() <= g_record_max) {
        trail.emplace_back(merger.count(), merger.error());
    }
    while (merger.count() > g_min && merger.step()) {
        if (merger.count() <= g_record_max) {
            trail.emplace_back(merger.count(), merger.error());
        }
    }
    ApproximationSequence seq(image.size());
    for (auto it = trail.rbegin(); it != trail.rend(); ++it) {
        seq.push(it->first, it->second, it->first);
    }
    return seq;
}

/// Partition into `g` connected segments produced by merge_connected_segments.
inline Partition connected_merge_partition(const Image& image, std::size_t g) {
    detail::ConnectedMerger merger(image);
    if (g > merger.count() || g < 1) {
        throw std::out_of_range("connected_merge_partition: g = " + std::to_string(g) + " outside [1, " +
                                std::to_string(merger.count()) + "]");
    }
    while (merger.count() > g) {
        merger.step();
    }
    return merger.partition();
}

} // namespace pixclust

#endif
