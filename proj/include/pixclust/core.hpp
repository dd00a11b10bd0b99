#ifndef PIXCLUST_CORE_HPP
#define PIXCLUST_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixclust/image.hpp"

/**
 * @file core.hpp
 * @brief Exact cluster statistics and the merge/split/correct error increments.
 *
 * Every cluster is summarized by integer accumulators (n, S, S2). The mean and
 * the within-cluster squared error are derived from them on demand, so merging
 * and removing clusters is exact and independent of the order of operations.
 */

namespace pixclust {

using wide_uint = unsigned __int128;
using wide_int = __int128;

/**
 * Pixel count, intensity sum and squared-intensity sum of a cluster.
 *
 * `S2` is 128 bits wide so that N·(L−1)² cannot overflow for N ≤ 2³² and
 * L ≤ 65536.
 */
struct ClusterStats {
    std::uint64_t n = 0;
    std::uint64_t sum = 0;
    wide_uint sum_sq = 0;

    static ClusterStats of_value(Intensity value, std::uint64_t count = 1) {
        const std::uint64_t v = value;
        return {count, v * count, static_cast<wide_uint>(v * v) * count};
    }

    bool empty() const { return n == 0; }

    double mean() const {
        if (n == 0) {
            throw std::logic_error("mean of an empty cluster");
        }
        return static_cast<double>(sum) / static_cast<double>(n);
    }

    /// Within-cluster squared error, S2 − S²/n. The numerator n·S2 − S² is exact.
    double error() const {
        if (n == 0) {
            return 0.0;
        }
        const wide_uint s = sum;
        const wide_uint numerator = static_cast<wide_uint>(n) * sum_sq - s * s;
        return static_cast<double>(numerator) / static_cast<double>(n);
    }

    friend bool operator==(const ClusterStats&, const ClusterStats&) = default;
};

namespace detail {

inline void check_overflow(bool overflow) {
    if (overflow) {
        throw std::overflow_error("cluster accumulator overflow: unsupported image size");
    }
}

// n_b·S_a − n_a·S_b, which is n_a·n_b·(I_a − I_b). Fits in 96 bits for N ≤ 2³², L ≤ 65536.
inline wide_int cross_difference(const ClusterStats& a, const ClusterStats& b) {
    return static_cast<wide_int>(b.n) * static_cast<wide_int>(a.sum) -
           static_cast<wide_int>(a.n) * static_cast<wide_int>(b.sum);
}

// (n_b·S_a − n_a·S_b)² / (n_a·n_b·(n_a + n_b)) == (I_a − I_b)² / (1/n_a + 1/n_b)
inline double weighted_mean_gap(wide_int cross, std::uint64_t na, std::uint64_t nb, std::uint64_t n_total) {
    const double d = static_cast<double>(cross);
    return d * d / (static_cast<double>(na) * static_cast<double>(nb) * static_cast<double>(n_total));
}

} // namespace detail

inline ClusterStats stats_from_pixels(std::span<const Intensity> pixels) {
    ClusterStats out;
    for (const Intensity p : pixels) {
        const std::uint64_t v = p;
        out.n += 1;
        out.sum += v;
        out.sum_sq += static_cast<wide_uint>(v * v);
    }
    return out;
}

inline ClusterStats merge_stats(const ClusterStats& a, const ClusterStats& b) {
    ClusterStats out;
    detail::check_overflow(__builtin_add_overflow(a.n, b.n, &out.n));
    detail::check_overflow(__builtin_add_overflow(a.sum, b.sum, &out.sum));
    detail::check_overflow(__builtin_add_overflow(a.sum_sq, b.sum_sq, &out.sum_sq));
    return out;
}

inline ClusterStats remove_stats(const ClusterStats& parent, const ClusterStats& part) {
    if (part.n > parent.n || part.sum > parent.sum || part.sum_sq > parent.sum_sq) {
        throw std::logic_error("remove_stats: part is not contained in parent");
    }
    return {parent.n - part.n, parent.sum - part.sum, parent.sum_sq - part.sum_sq};
}

/// Increment of E when clusters `a` and `b` are merged into one. Never negative.
inline double delta_e_merge(const ClusterStats& a, const ClusterStats& b) {
    if (a.n == 0 || b.n == 0) {
        throw std::logic_error("delta_e_merge: empty cluster");
    }
    return detail::weighted_mean_gap(detail::cross_difference(a, b), a.n, b.n, a.n + b.n);
}

/**
 * Increment of E when the `part.n` pixels described by `part` leave `parent`
 * and form a cluster of their own. Never positive.
 *
 * Uses the same numerator and denominator as delta_e_merge(part, parent − part),
 * so the two are exact negations of each other.
 */
inline double delta_e_split(const ClusterStats& parent, const ClusterStats& part) {
    if (part.n == 0 || part.n >= parent.n) {
        throw std::logic_error("delta_e_split: part must be a proper nonempty subset");
    }
    const std::uint64_t rest_n = parent.n - part.n;
    // n_1·S_k − k·S_1 == (n_1 − k)·S_k − k·(S_1 − S_k)
    const wide_int cross = static_cast<wide_int>(parent.n) * static_cast<wide_int>(part.sum) -
                           static_cast<wide_int>(part.n) * static_cast<wide_int>(parent.sum);
    return -detail::weighted_mean_gap(cross, part.n, rest_n, parent.n);
}

/// Increment of E when `moved` leaves `donor` and joins `acceptor`. The cluster count is unchanged.
inline double delta_e_correct(const ClusterStats& donor, const ClusterStats& moved, const ClusterStats& acceptor) {
    if (moved.n >= donor.n) {
        throw std::logic_error("delta_e_correct: moved pixels would exhaust the donor");
    }
    return delta_e_merge(moved, acceptor) + delta_e_split(donor, moved);
}

/// Oracle comparison: `rel` of the largest magnitude among a, b and `scale`, with `rel` as an absolute floor.
inline bool approx_equal(double a, double b, double rel = 1e-9, double scale = 0.0) {
    const double ref = std::max({std::abs(a), std::abs(b), std::abs(scale)});
    return std::abs(a - b) <= rel * std::max(ref, 1.0);
}

using Label = std::uint32_t;

/**
 * A labeling of the image pixels into clusters.
 *
 * Labels are dense: every id in [0, g) owns at least one pixel.
 */
class Partition {
public:
    Partition() = default;

    Partition(const Image& image, std::vector<Label> labels) : labels_(std::move(labels)) {
        if (labels_.size() != image.size()) {
            throw std::invalid_argument("partition labels do not cover the image");
        }
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const Label l = labels_[i];
            if (l >= clusters_.size()) {
                clusters_.resize(static_cast<std::size_t>(l) + 1);
            }
            clusters_[l] = merge_stats(clusters_[l], ClusterStats::of_value(image.pixels[i]));
        }
        for (const auto& c : clusters_) {
            if (c.empty()) {
                throw std::invalid_argument("partition labels are not dense");
            }
        }
    }

    /// Every pixel in one cluster.
    static Partition single(const Image& image) { return Partition(image, std::vector<Label>(image.size(), 0)); }

    const std::vector<Label>& labels() const { return labels_; }
    const std::vector<ClusterStats>& clusters() const { return clusters_; }
    const ClusterStats& cluster(Label id) const { return clusters_.at(id); }
    std::size_t g() const { return clusters_.size(); }
    std::size_t pixel_count() const { return labels_.size(); }

    double total_error() const {
        double e = 0.0;
        for (const auto& c : clusters_) {
            e += c.error();
        }
        return e;
    }

private:
    std::vector<Label> labels_;
    std::vector<ClusterStats> clusters_;
};

/// Two-pass reference: cluster means first, then the squared deviations of every pixel.
inline double brute_force_E(const Image& image, std::span<const Label> labels) {
    if (labels.size() != image.size()) {
        throw std::invalid_argument("brute_force_E: labels do not cover the image");
    }
    Label max_label = 0;
    for (const Label l : labels) {
        max_label = std::max(max_label, l);
    }
    std::vector<long double> sums(static_cast<std::size_t>(max_label) + 1, 0.0L);
    std::vector<std::uint64_t> counts(sums.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sums[labels[i]] += image.pixels[i];
        counts[labels[i]] += 1;
    }
    std::vector<long double> means(sums.size(), 0.0L);
    for (std::size_t c = 0; c < sums.size(); ++c) {
        if (counts[c] > 0) {
            means[c] = sums[c] / static_cast<long double>(counts[c]);
        }
    }
    long double e = 0.0L;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const long double d = static_cast<long double>(image.pixels[i]) - means[labels[i]];
        e += d * d;
    }
    return static_cast<double>(e);
}

/// True when every cluster of `fine` lies inside a single cluster of `coarse`.
inline bool refines(std::span<const Label> fine, std::span<const Label> coarse) {
    if (fine.size() != coarse.size()) {
        return false;
    }
    Label max_label = 0;
    for (const Label l : fine) {
        max_label = std::max(max_label, l);
    }
    constexpr Label unset = ~Label{0};
    std::vector<Label> parent(static_cast<std::size_t>(max_label) + 1, unset);
    for (std::size_t i = 0; i < fine.size(); ++i) {
        Label& p = parent[fine[i]];
        if (p == unset) {
            p = coarse[i];
        } else if (p != coarse[i]) {
            return false;
        }
    }
    return true;
}

} // namespace pixclust

#endif
