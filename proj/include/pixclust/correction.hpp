#ifndef PIXCLUST_CORRECTION_HPP
#define PIXCLUST_CORRECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/image.hpp"

/**
 * @file correction.hpp
 * @brief Refinement of a partition at fixed cluster count.
 *
 * A move takes every pixel of one intensity out of a donor cluster and hands
 * it to an acceptor cluster; its exact cost is delta_e_correct. The Lloyd step
 * is the same move set with the cost replaced by nearest-mean assignment.
 */

namespace pixclust {

struct MoveCandidate {
    Label donor = 0;
    Label acceptor = 0;
    Intensity level = 0;
    ClusterStats group;
    double delta = 0.0;
};

namespace detail {

/// Pixel counts of every (cluster, intensity) group.
inline std::vector<std::map<Intensity, std::uint64_t>> intensity_groups(const Partition& p, const Image& image) {
    std::vector<std::map<Intensity, std::uint64_t>> groups(p.g());
    const auto& labels = p.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        ++groups[labels[i]][image.pixels[i]];
    }
    return groups;
}

inline bool candidate_before(const MoveCandidate& a, const MoveCandidate& b) {
    return std::tie(a.delta, a.donor, a.level, a.acceptor) < std::tie(b.delta, b.donor, b.level, b.acceptor);
}

// Noise floor for a correction: the merge and split terms are each accurate to a
// few ulps, so a move counts as improving only below −1e−12 of the split term.
inline double improvement_threshold(const ClusterStats& donor, const ClusterStats& group) {
    return -1e-12 * std::max(1.0, -delta_e_split(donor, group));
}

} // namespace detail

/// Every (donor, intensity group, acceptor) move that leaves the donor nonempty, best first.
inline std::vector<MoveCandidate> enumerate_candidates(const Partition& p, const Image& image) {
    std::vector<MoveCandidate> out;
    const auto groups = detail::intensity_groups(p, image);
    for (Label donor = 0; donor < p.g(); ++donor) {
        const ClusterStats& d = p.cluster(donor);
        for (const auto& [level, count] : groups[donor]) {
            if (count >= d.n) {
                continue;
            }
            const ClusterStats group = ClusterStats::of_value(level, count);
            for (Label acceptor = 0; acceptor < p.g(); ++acceptor) {
                if (acceptor == donor) {
                    continue;
                }
                out.push_back({donor, acceptor, level, group, delta_e_correct(d, group, p.cluster(acceptor))});
            }
        }
    }
    std::sort(out.begin(), out.end(), detail::candidate_before);
    return out;
}

struct CorrectionResult {
    Partition partition;
    /// Applied moves in order.
    std::vector<MoveCandidate> moves;
};

/**
 * Best-improvement descent: applies the most negative move while one exists.
 * Cluster count is preserved and E strictly decreases with every move.
 */
inline CorrectionResult correct_partition_traced(const Partition& p, const Image& image) {
    auto groups = detail::intensity_groups(p, image);
    std::vector<ClusterStats> clusters = p.clusters();
    const std::size_t g = clusters.size();
    std::vector<MoveCandidate> moves;

    while (true) {
        MoveCandidate best;
        bool found = false;
        for (Label donor = 0; donor < g; ++donor) {
            const ClusterStats& d = clusters[donor];
            for (const auto& [level, count] : groups[donor]) {
                if (count >= d.n) {
                    continue;
                }
                const ClusterStats group = ClusterStats::of_value(level, count);
                const double threshold = detail::improvement_threshold(d, group);
                for (Label acceptor = 0; acceptor < g; ++acceptor) {
                    if (acceptor == donor) {
                        continue;
                    }
                    const double delta = delta_e_correct(d, group, clusters[acceptor]);
                    if (delta >= threshold) {
                        continue;
                    }
                    MoveCandidate c{donor, acceptor, level, group, delta};
                    if (!found || detail::candidate_before(c, best)) {
                        best = c;
                        found = true;
                    }
                }
            }
        }
        if (!found) {
            break;
        }
        clusters[best.donor] = remove_stats(clusters[best.donor], best.group);
        clusters[best.acceptor] = merge_stats(clusters[best.acceptor], best.group);
        groups[best.donor].erase(best.level);
        groups[best.acceptor][best.level] += best.group.n;
        moves.push_back(best);
    }

    if (moves.empty()) {
        return {p, {}};
    }
    // moves touching each intensity, in application order
    std::vector<std::vector<const MoveCandidate*>> by_level(image.levels);
    for (const auto& m : moves) {
        by_level[m.level].push_back(&m);
    }
    std::vector<Label> labels = p.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        for (const MoveCandidate* m : by_level[image.pixels[i]]) {
            if (m->donor == labels[i]) {
                labels[i] = m->acceptor;
            }
        }
    }
    return {Partition(image, std::move(labels)), std::move(moves)};
}

inline Partition correct_partition(const Partition& p, const Image& image) {
    return correct_partition_traced(p, image).partition;
}

/**
 * One Lloyd step in intensity space: every intensity goes to the cluster with
 * the nearest mean (ties to the lower mean, then the lower id). A cluster that
 * would be left empty keeps its previous pixels, so g is preserved and E does
 * not increase.
 */
inline Partition kmeans_step(const Partition& p, const Image& image) {
    const std::size_t g = p.g();
    std::vector<double> means(g);
    for (Label c = 0; c < g; ++c) {
        means[c] = p.cluster(c).mean();
    }
    std::vector<Label> nearest(image.levels, 0);
    for (std::uint32_t v = 0; v < image.levels; ++v) {
        Label best = 0;
        for (Label c = 1; c < g; ++c) {
            const double dc = std::abs(static_cast<double>(v) - means[c]);
            const double db = std::abs(static_cast<double>(v) - means[best]);
            if (dc < db || (dc == db && std::tie(means[c], c) < std::tie(means[best], best))) {
                best = c;
            }
        }
        nearest[v] = best;
    }

    const auto& old = p.labels();
    std::vector<Label> labels(old.size());
    std::vector<bool> keep_old(g, false);
    while (true) {
        std::vector<std::uint64_t> counts(g, 0);
        for (std::size_t i = 0; i < old.size(); ++i) {
            labels[i] = keep_old[old[i]] ? old[i] : nearest[image.pixels[i]];
            ++counts[labels[i]];
        }
        bool changed = false;
        for (Label c = 0; c < g; ++c) {
            if (counts[c] == 0 && !keep_old[c]) {
                keep_old[c] = true;
                changed = true;
            }
        }
        if (!changed) {
            break;
        }
    }
    return Partition(image, std::move(labels));
}

/// Lloyd iterations until the labeling stops changing.
inline Partition kmeans(const Partition& p, const Image& image, std::size_t max_iterations = 1000) {
    Partition cur = p;
    for (std::size_t it = 0; it < max_iterations; ++it) {
        Partition next = kmeans_step(cur, image);
        if (next.labels() == cur.labels()) {
            break;
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace pixclust

#endif
