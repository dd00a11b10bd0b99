#ifndef PIXCLUST_CLUSTERING_HPP
#define PIXCLUST_CLUSTERING_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/image.hpp"
#include "pixclust/sequence.hpp"

/**
 * @file clustering.hpp
 * @brief Hierarchical quasioptimal approximations over the intensity histogram.
 *
 * Elementary clusters are populated intensity values. A Dendrogram is built either
 * top-down (dichotomous Otsu splitting of every non-uniform cluster) or bottom-up
 * (greedy merging by the smallest merge increment), and is then expanded into the
 * sequence of partitions into g = 1, 2, 3, ... clusters by always executing the
 * pending split with the largest decrease of E.
 */

namespace pixclust {

/// Thrown when a split is requested for a cluster of identical pixels.
class IndivisibleCluster : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using NodeId = std::int32_t;
inline constexpr NodeId no_node = -1;

struct DendrogramNode {
    ClusterStats stats;
    NodeId left = no_node;
    NodeId right = no_node;
    /// E(children) − E(node); zero for leaves, never positive.
    double split_delta = 0.0;
    /// Leaves cover intensities [lo, hi). For internal nodes lo is the smallest covered intensity.
    std::uint32_t lo = 0;
    std::uint32_t hi = 0;
    std::uint32_t depth = 0;

    bool is_leaf() const { return left == no_node; }
};

class Dendrogram {
public:
    Dendrogram() = default;
    explicit Dendrogram(std::uint32_t levels) : levels_(levels) {}

    std::uint32_t levels() const { return levels_; }
    NodeId root() const { return root_; }
    const DendrogramNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
    const std::vector<DendrogramNode>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                                      [](const DendrogramNode& n) { return n.is_leaf(); }));
    }

    NodeId add_leaf(const ClusterStats& stats, std::uint32_t lo, std::uint32_t hi, std::uint32_t depth = 0) {
        DendrogramNode n;
        n.stats = stats;
        n.lo = lo;
        n.hi = hi;
        n.depth = depth;
        nodes_.push_back(n);
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    /// Turns `parent` (a leaf so far) into an internal node over the given children.
    void attach(NodeId parent, NodeId left, NodeId right, double split_delta) {
        auto& p = nodes_.at(static_cast<std::size_t>(parent));
        p.left = left;
        p.right = right;
        p.split_delta = split_delta;
    }

    /// New internal node above two existing roots; `split_delta` is the negated merge increment.
    NodeId join(NodeId a, NodeId b, double split_delta) {
        const auto& na = node(a);
        const auto& nb = node(b);
        DendrogramNode n;
        n.stats = merge_stats(na.stats, nb.stats);
        n.left = na.lo <= nb.lo ? a : b;
        n.right = na.lo <= nb.lo ? b : a;
        n.split_delta = split_delta;
        n.lo = std::min(na.lo, nb.lo);
        n.hi = std::max(na.hi, nb.hi);
        nodes_.push_back(n);
        return static_cast<NodeId>(nodes_.size() - 1);
    }

    void set_root(NodeId r) { root_ = r; }

    /// Internal nodes get lo/hi spanning their subtree. Children must precede parents.
    void refresh_spans() {
        for (auto& n : nodes_) {
            if (!n.is_leaf()) {
                const auto& l = nodes_[static_cast<std::size_t>(n.left)];
                const auto& r = nodes_[static_cast<std::size_t>(n.right)];
                n.lo = std::min(l.lo, r.lo);
                n.hi = std::max(l.hi, r.hi);
            }
        }
    }

    /// Leaves of the subtree rooted at `id`, left to right.
    std::vector<NodeId> leaves_under(NodeId id) const {
        std::vector<NodeId> out;
        std::vector<NodeId> stack{id};
        while (!stack.empty()) {
            const NodeId cur = stack.back();
            stack.pop_back();
            const auto& n = node(cur);
            if (n.is_leaf()) {
                out.push_back(cur);
            } else {
                stack.push_back(n.right);
                stack.push_back(n.left);
            }
        }
        return out;
    }

private:
    std::uint32_t levels_ = 0;
    NodeId root_ = no_node;
    std::vector<DendrogramNode> nodes_;
};

struct BinarySplit {
    /// Lower part is [a, threshold), upper part is [threshold, b).
    std::uint32_t threshold = 0;
    double delta = 0.0;
    ClusterStats lower;
    ClusterStats upper;
};

/**
 * Exhaustive single-threshold split of the pixels with intensity in [a, b)
 * maximizing the decrease of E. Thresholds sit right after a populated
 * intensity; ties go to the lowest threshold.
 */
inline BinarySplit best_binary_split(const Histogram& h, std::uint32_t a, std::uint32_t b) {
    const auto& pop = h.populated();
    const auto first = std::lower_bound(pop.begin(), pop.end(), a);
    const auto last = std::lower_bound(pop.begin(), pop.end(), b);
    if (last - first < 2) {
        throw IndivisibleCluster("cluster over [" + std::to_string(a) + ", " + std::to_string(b) +
                                 ") holds a single intensity");
    }
    const ClusterStats parent = h.range_stats(a, b);
    BinarySplit best;
    best.delta = std::numeric_limits<double>::infinity();
    for (auto it = first; it + 1 != last; ++it) {
        const std::uint32_t t = static_cast<std::uint32_t>(*it) + 1;
        const ClusterStats lower = h.range_stats(a, t);
        const double delta = delta_e_split(parent, lower);
        if (delta < best.delta) {
            best.threshold = t;
            best.delta = delta;
            best.lower = lower;
        }
    }
    best.upper = remove_stats(parent, best.lower);
    return best;
}

inline BinarySplit best_binary_split(const Histogram& h) { return best_binary_split(h, 0, h.levels()); }

/**
 * Top-down dendrogram: every non-uniform cluster is split in two by
 * best_binary_split independently of the others, down to `max_depth`.
 * Level d of the tree is the compact partition into at most 2^d clusters.
 */
inline Dendrogram build_compact_representation(const Histogram& h, std::uint32_t max_depth = 16) {
    Dendrogram d(h.levels());
    const NodeId root = d.add_leaf(h.range_stats(0, h.levels()), 0, h.levels(), 0);
    d.set_root(root);
    // Breadth-first so node ids follow levels.
    std::vector<NodeId> level{root};
    for (std::uint32_t depth = 0; depth < max_depth && !level.empty(); ++depth) {
        std::vector<NodeId> next;
        for (const NodeId id : level) {
            const DendrogramNode n = d.node(id);
            const auto& pop = h.populated();
            const auto first = std::lower_bound(pop.begin(), pop.end(), n.lo);
            const auto last = std::lower_bound(pop.begin(), pop.end(), n.hi);
            if (last - first < 2) {
                continue;
            }
            const BinarySplit s = best_binary_split(h, n.lo, n.hi);
            const NodeId l = d.add_leaf(s.lower, n.lo, s.threshold, depth + 1);
            const NodeId r = d.add_leaf(s.upper, s.threshold, n.hi, depth + 1);
            d.attach(id, l, r, s.delta);
            next.push_back(l);
            next.push_back(r);
        }
        level = std::move(next);
    }
    return d;
}

inline Dendrogram build_compact_representation(const Image& image, std::uint32_t max_depth = 16) {
    return build_compact_representation(build_histogram(image), max_depth);
}

/// Nodes forming the compact partition at `depth`: nodes at that depth plus shallower leaves.
inline std::vector<NodeId> compact_level(const Dendrogram& d, std::uint32_t depth) {
    std::vector<NodeId> out;
    std::vector<NodeId> stack{d.root()};
    while (!stack.empty()) {
        const NodeId id = stack.back();
        stack.pop_back();
        const auto& n = d.node(id);
        if (n.is_leaf() || n.depth == depth) {
            out.push_back(id);
        } else {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
    return out;
}

/**
 * Replays the greedy expansion of a dendrogram one split at a time while
 * keeping a per-intensity label table. Splitting a cluster keeps its label on
 * the left child and gives the right child the next free label, so labels stay
 * dense and successive partitions are nested.
 */
class ExpansionCursor {
public:
    explicit ExpansionCursor(const Dendrogram& d) : d_(&d), level_labels_(d.levels(), 0), node_label_(d.size(), 0) {
        if (d.root() == no_node) {
            throw std::invalid_argument("expansion of an empty dendrogram");
        }
        E_ = d.node(d.root()).stats.error();
        push(d.root());
    }

    std::size_t g() const { return g_; }
    double error() const { return static_cast<double>(E_); }
    bool done() const { return pending_.empty(); }
    const std::vector<Label>& level_labels() const { return level_labels_; }

    /// Splits the pending node with the most negative delta; returns it.
    NodeId step() {
        if (pending_.empty()) {
            throw std::logic_error("expansion exhausted");
        }
        const NodeId id = std::get<2>(pending_.top());
        pending_.pop();
        const auto& n = d_->node(id);
        const Label lbl = node_label_[static_cast<std::size_t>(id)];
        const Label fresh = static_cast<Label>(g_);
        node_label_[static_cast<std::size_t>(n.left)] = lbl;
        node_label_[static_cast<std::size_t>(n.right)] = fresh;
        for (const NodeId leaf : d_->leaves_under(n.right)) {
            const auto& ln = d_->node(leaf);
            for (std::uint32_t v = ln.lo; v < ln.hi; ++v) {
                level_labels_[v] = fresh;
            }
        }
        E_ += static_cast<long double>(d_->node(n.left).stats.error()) +
              static_cast<long double>(d_->node(n.right).stats.error()) - static_cast<long double>(n.stats.error());
        ++g_;
        push(n.left);
        push(n.right);
        return id;
    }

private:
    // (delta, lowest intensity, node); min-heap
    using Entry = std::tuple<double, std::uint32_t, NodeId>;

    void push(NodeId id) {
        const auto& n = d_->node(id);
        if (!n.is_leaf()) {
            pending_.emplace(n.split_delta, n.lo, id);
        }
    }

    const Dendrogram* d_;
    std::vector<Label> level_labels_;
    std::vector<Label> node_label_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pending_;
    std::size_t g_ = 1;
    long double E_ = 0.0L;
};

struct Expansion {
    ApproximationSequence sequence;
    /// Node split at step g → g+1.
    std::vector<NodeId> split_order;
};

/**
 * Expands a dendrogram into records for g = 1 … min(g_max, leaf count).
 * The partition at any g is recovered with cut_levels / cut_dendrogram.
 */
inline Expansion expand_to_sequence(const Dendrogram& d, std::size_t g_max) {
    if (g_max < 1) {
        throw std::invalid_argument("expand_to_sequence: g_max must be at least 1");
    }
    Expansion out{ApproximationSequence(d.node(d.root()).stats.n), {}};
    ExpansionCursor cursor(d);
    out.sequence.push(1, cursor.error());
    while (cursor.g() < g_max && !cursor.done()) {
        out.split_order.push_back(cursor.step());
        out.sequence.push(cursor.g(), cursor.error());
    }
    if (cursor.g() < g_max) {
        out.sequence.warning = "requested g up to " + std::to_string(g_max) + " but the hierarchy has only " +
                               std::to_string(cursor.g()) + " elementary clusters";
    }
    return out;
}

/// Per-intensity labels of the expansion's partition into g clusters.
inline std::vector<Label> cut_levels(const Dendrogram& d, std::size_t g) {
    ExpansionCursor cursor(d);
    if (g < 1) {
        throw std::out_of_range("cut_dendrogram: g must be at least 1");
    }
    while (cursor.g() < g) {
        if (cursor.done()) {
            throw std::out_of_range("cut_dendrogram: g = " + std::to_string(g) + " exceeds the leaf count " +
                                    std::to_string(cursor.g()));
        }
        cursor.step();
    }
    return cursor.level_labels();
}

inline Partition cut_dendrogram(const Dendrogram& d, std::size_t g, const Image& image) {
    return Partition(image, labels_from_levels(image, cut_levels(d, g)));
}

/**
 * Bottom-up hierarchy by repeatedly merging the pair of clusters, over all
 * current pairs, with the smallest merge increment. Leaf i is elementary[i] and
 * covers "intensity" [i, i+1); merged clusters get ids m, m+1, ... and ties go to
 * the lexicographically smallest (lower id, higher id) pair.
 */
inline Dendrogram greedy_merge_all_pairs(std::span<const ClusterStats> elementary) {
    if (elementary.empty()) {
        throw std::invalid_argument("greedy_merge_all_pairs: no elementary clusters");
    }
    const std::size_t m = elementary.size();
    Dendrogram d(static_cast<std::uint32_t>(m));
    for (std::size_t i = 0; i < m; ++i) {
        d.add_leaf(elementary[i], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1));
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<NodeId> active(m);
    for (std::size_t i = 0; i < m; ++i) {
        active[i] = static_cast<NodeId>(i);
    }
    // nearest partner with a larger id, per node
    std::vector<NodeId> nn(2 * m, no_node);
    std::vector<double> nn_delta(2 * m, inf);

    auto refresh = [&](std::size_t pos) {
        const NodeId i = active[pos];
        nn[static_cast<std::size_t>(i)] = no_node;
        nn_delta[static_cast<std::size_t>(i)] = inf;
        for (std::size_t q = pos + 1; q < active.size(); ++q) {
            const double delta = delta_e_merge(d.node(i).stats, d.node(active[q]).stats);
            if (delta < nn_delta[static_cast<std::size_t>(i)]) {
                nn_delta[static_cast<std::size_t>(i)] = delta;
                nn[static_cast<std::size_t>(i)] = active[q];
            }
        }
    };
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
        refresh(pos);
    }

    while (active.size() > 1) {
        std::size_t best_pos = 0;
        for (std::size_t pos = 1; pos < active.size(); ++pos) {
            if (nn_delta[static_cast<std::size_t>(active[pos])] <
                nn_delta[static_cast<std::size_t>(active[best_pos])]) {
                best_pos = pos;
            }
        }
        const NodeId a = active[best_pos];
        const NodeId b = nn[static_cast<std::size_t>(a)];
        const double delta = nn_delta[static_cast<std::size_t>(a)];
        const NodeId c = d.join(a, b, -delta);

        std::erase(active, a);
        std::erase(active, b);
        active.push_back(c);
        for (std::size_t pos = 0; pos + 1 < active.size(); ++pos) {
            const auto i = static_cast<std::size_t>(active[pos]);
            if (nn[i] == a || nn[i] == b) {
                refresh(pos);
            } else {
                const double dc = delta_e_merge(d.node(active[pos]).stats, d.node(c).stats);
                if (dc < nn_delta[i]) {
                    nn_delta[i] = dc;
                    nn[i] = c;
                }
            }
        }
    }
    d.set_root(active.front());
    return d;
}

namespace detail {

inline Dendrogram with_histogram_leaves(Dendrogram d, const Histogram& h) {
    const auto& pop = h.populated();
    Dendrogram out(h.levels());
    for (const auto& n : d.nodes()) {
        if (n.is_leaf()) {
            out.add_leaf(n.stats, pop[n.lo], static_cast<std::uint32_t>(pop[n.lo]) + 1);
        } else {
            out.add_leaf(n.stats, 0, 0);
        }
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto& n = d.nodes()[i];
        if (!n.is_leaf()) {
            out.attach(static_cast<NodeId>(i), n.left, n.right, n.split_delta);
        }
    }
    out.set_root(d.root());
    out.refresh_spans();
    return out;
}

inline std::vector<ClusterStats> elementary_clusters(const Histogram& h) {
    std::vector<ClusterStats> out;
    out.reserve(h.populated().size());
    for (const Intensity v : h.populated()) {
        out.push_back(h.bin_stats(v));
    }
    return out;
}

} // namespace detail

/// All-pairs greedy merging over the populated intensities of `h`.
inline Dendrogram greedy_merge_all_pairs(const Histogram& h) {
    const auto elementary = detail::elementary_clusters(h);
    return detail::with_histogram_leaves(greedy_merge_all_pairs(elementary), h);
}

/**
 * Same as greedy_merge_all_pairs, but only clusters that are neighbors on the
 * intensity axis (successive runs of histogram bins) may merge.
 */
inline Dendrogram greedy_merge_adjacent_bins(std::span<const ClusterStats> elementary) {
    if (elementary.empty()) {
        throw std::invalid_argument("greedy_merge_adjacent_bins: no elementary clusters");
    }
    const std::size_t m = elementary.size();
    Dendrogram d(static_cast<std::uint32_t>(m));
    for (std::size_t i = 0; i < m; ++i) {
        d.add_leaf(elementary[i], static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i + 1));
    }
    // doubly linked list of current runs, indexed by node id
    std::vector<NodeId> prev(2 * m, no_node);
    std::vector<NodeId> next(2 * m, no_node);
    std::vector<bool> alive(2 * m, false);
    for (std::size_t i = 0; i < m; ++i) {
        alive[i] = true;
        prev[i] = i == 0 ? no_node : static_cast<NodeId>(i - 1);
        next[i] = i + 1 == m ? no_node : static_cast<NodeId>(i + 1);
    }
    using Entry = std::tuple<double, NodeId, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    auto offer = [&](NodeId x, NodeId y) {
        if (x == no_node || y == no_node) {
            return;
        }
        heap.emplace(delta_e_merge(d.node(x).stats, d.node(y).stats), std::min(x, y), std::max(x, y));
    };
    for (std::size_t i = 0; i + 1 < m; ++i) {
        offer(static_cast<NodeId>(i), static_cast<NodeId>(i + 1));
    }
    NodeId last = 0;
    while (!heap.empty()) {
        const auto [delta, x, y] = heap.top();
        heap.pop();
        if (!alive[static_cast<std::size_t>(x)] || !alive[static_cast<std::size_t>(y)]) {
            continue;
        }
        const NodeId left = next[static_cast<std::size_t>(x)] == y ? x : y;
        const NodeId right = left == x ? y : x;
        const NodeId c = d.join(left, right, -delta);
        alive[static_cast<std::size_t>(x)] = false;
        alive[static_cast<std::size_t>(y)] = false;
        alive[static_cast<std::size_t>(c)] = true;
        prev[static_cast<std::size_t>(c)] = prev[static_cast<std::size_t>(left)];
        next[static_cast<std::size_t>(c)] = next[static_cast<std::size_t>(right)];
        if (prev[static_cast<std::size_t>(c)] != no_node) {
            next[static_cast<std::size_t>(prev[static_cast<std::size_t>(c)])] = c;
        }
        if (next[static_cast<std::size_t>(c)] != no_node) {
            prev[static_cast<std::size_t>(next[static_cast<std::size_t>(c)])] = c;
        }
        offer(prev[static_cast<std::size_t>(c)], c);
        offer(c, next[static_cast<std::size_t>(c)]);
        last = c;
    }
    d.set_root(m == 1 ? 0 : last);
    return d;
}

inline Dendrogram greedy_merge_adjacent_bins(const Histogram& h) {
    const auto elementary = detail::elementary_clusters(h);
    return detail::with_histogram_leaves(greedy_merge_adjacent_bins(elementary), h);
}

/// Merge steps of a bottom-up dendrogram as (lower child, upper child, merge increment), in merge order.
inline std::vector<std::tuple<NodeId, NodeId, double>> merge_history(const Dendrogram& d) {
    std::vector<std::tuple<NodeId, NodeId, double>> out;
    for (const auto& n : d.nodes()) {
        if (!n.is_leaf()) {
            out.emplace_back(n.left, n.right, -n.split_delta);
        }
    }
    return out;
}

/**
 * E after each step of a bottom-up dendrogram taken in merge order, i.e. the
 * state of the merge loop itself rather than a top-down expansion. Records
 * run from g = 1 to min(g_max, leaf count).
 */
inline ApproximationSequence merge_order_sequence(const Dendrogram& d, std::size_t g_max) {
    std::vector<double> deltas;
    long double leaf_error = 0.0L;
    for (const auto& n : d.nodes()) {
        if (n.is_leaf()) {
            leaf_error += n.stats.error();
        } else {
            deltas.push_back(-n.split_delta);
        }
    }
    // E with g clusters = leaf error + the first (leaves − g) merge increments
    const std::size_t leaves = deltas.size() + 1;
    std::vector<long double> E(leaves + 1, 0.0L);
    E[leaves] = leaf_error;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        E[leaves - k - 1] = E[leaves - k] + deltas[k];
    }
    ApproximationSequence seq(d.node(d.root()).stats.n);
    for (std::size_t g = 1; g <= std::min(g_max, leaves); ++g) {
        seq.push(g, static_cast<double>(E[g]));
    }
    return seq;
}

} // namespace pixclust

#endif
