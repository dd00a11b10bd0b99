#ifndef PIXCLUST_OPTIMAL_HPP
#define PIXCLUST_OPTIMAL_HPP

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/sequence.hpp"

/**
 * @file optimal.hpp
 * @brief Globally optimal g-cluster approximations of an intensity histogram.
 *
 * For scalar intensities a squared-error-optimal clustering consists of
 * intensity intervals, so the optimum over all pixel clusterings is an interval
 * partition and can be found by dynamic programming over populated bins.
 *
 * The total E of a threshold set is always accumulated right to left,
 * cost(first class) + (cost(second class) + (...)), both here and in the
 * exhaustive oracle. With the same association and monotone rounding the two
 * minima agree to the last bit.
 */

namespace pixclust {

struct ThresholdSet {
    /// Class c covers [thresholds[c−1], thresholds[c]); the first class starts at 0, the last ends at L.
    std::vector<std::uint32_t> thresholds;
    double E = 0.0;

    std::size_t g() const { return thresholds.size() + 1; }

    /// Per-intensity class labels over `levels` intensities.
    std::vector<Label> level_labels(std::uint32_t levels) const {
        std::vector<Label> out(levels, 0);
        Label c = 0;
        std::size_t next = 0;
        for (std::uint32_t v = 0; v < levels; ++v) {
            while (next < thresholds.size() && v >= thresholds[next]) {
                ++c;
                ++next;
            }
            out[v] = c;
        }
        return out;
    }
};

namespace detail {

/// Range costs over populated bins: cost(i, j) is the E of bins i … j−1 taken as one class.
class BinCosts {
public:
    explicit BinCosts(const Histogram& h) : h_(&h), pop_(&h.populated()) {}

    std::size_t size() const { return pop_->size(); }

    double cost(std::size_t i, std::size_t j) const {
        return h_->range_stats((*pop_)[i], static_cast<std::uint32_t>((*pop_)[j - 1]) + 1).error();
    }

    /// Threshold placed after bin j−1.
    std::uint32_t threshold_before(std::size_t j) const { return static_cast<std::uint32_t>((*pop_)[j - 1]) + 1; }

private:
    const Histogram* h_;
    const std::vector<Intensity>* pop_;
};

/// One DP layer: best[i] = min over j of cost(i, j) + prev[j], for suffixes split into one more class.
inline void dp_layer(const BinCosts& costs, std::size_t classes, const std::vector<double>& prev,
                     std::vector<double>& best, std::vector<std::uint32_t>* arg) {
    const std::size_t m = costs.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    best.assign(m + 1, inf);
    if (arg != nullptr) {
        arg->assign(m + 1, 0);
    }
    for (std::size_t i = 0; i + classes <= m; ++i) {
        double b = inf;
        std::uint32_t bj = 0;
        // the remaining classes - 1 classes need at least that many bins after j
        for (std::size_t j = i + 1; j + classes - 1 <= m; ++j) {
            const double v = costs.cost(i, j) + prev[j];
            if (v < b) {
                b = v;
                bj = static_cast<std::uint32_t>(j);
            }
        }
        best[i] = b;
        if (arg != nullptr) {
            (*arg)[i] = bj;
        }
    }
}

inline std::vector<double> single_class_layer(const BinCosts& costs) {
    const std::size_t m = costs.size();
    std::vector<double> out(m + 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = costs.cost(i, m);
    }
    return out;
}

} // namespace detail

/**
 * Threshold set minimizing E over all partitions of the intensity axis into g
 * classes, each holding at least one pixel. Among equal minima the
 * lexicographically smallest threshold vector wins.
 */
inline ThresholdSet optimal_partition(const Histogram& h, std::size_t g) {
    const detail::BinCosts costs(h);
    const std::size_t m = costs.size();
    if (g < 1 || g > m) {
        throw std::out_of_range("optimal_partition: g = " + std::to_string(g) + " outside [1, " + std::to_string(m) +
                                "] populated intensities");
    }
    std::vector<std::vector<std::uint32_t>> args(g + 1);
    std::vector<double> layer = detail::single_class_layer(costs);
    std::vector<double> next;
    for (std::size_t c = 2; c <= g; ++c) {
        detail::dp_layer(costs, c, layer, next, &args[c]);
        layer.swap(next);
    }
    ThresholdSet out;
    out.E = layer[0];
    std::size_t i = 0;
    for (std::size_t c = g; c >= 2; --c) {
        const std::size_t j = args[c][i];
        out.thresholds.push_back(costs.threshold_before(j));
        i = j;
    }
    return out;
}

/// Optimal E for g = 1 … min(g_max, populated intensities).
inline ApproximationSequence optimal_sequence(const Histogram& h, std::size_t g_max) {
    if (g_max < 1) {
        throw std::invalid_argument("optimal_sequence: g_max must be at least 1");
    }
    const detail::BinCosts costs(h);
    const std::size_t top = std::min(g_max, costs.size());
    ApproximationSequence seq(h.total());
    std::vector<double> layer = detail::single_class_layer(costs);
    std::vector<double> next;
    seq.push(1, layer[0]);
    for (std::size_t c = 2; c <= top; ++c) {
        detail::dp_layer(costs, c, layer, next, nullptr);
        layer.swap(next);
        seq.push(c, layer[0]);
    }
    if (top < g_max) {
        seq.warning = "requested g up to " + std::to_string(g_max) + " but the image has only " +
                      std::to_string(costs.size()) + " distinct intensities";
    }
    return seq;
}

/// Brute-force enumeration of every threshold placement. Limited to 20 populated bins and g ≤ 5.
inline ThresholdSet exhaustive_optimal(const Histogram& h, std::size_t g) {
    const detail::BinCosts costs(h);
    const std::size_t m = costs.size();
    if (m > 20 || g > 5) {
        throw std::invalid_argument("exhaustive_optimal: limited to 20 populated intensities and g <= 5");
    }
    if (g < 1 || g > m) {
        throw std::out_of_range("exhaustive_optimal: g outside the populated range");
    }
    // cuts[k] is the first bin of class k + 1
    std::vector<std::size_t> cuts(g - 1);
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        cuts[k] = k + 1;
    }
    ThresholdSet best;
    best.E = std::numeric_limits<double>::infinity();
    while (true) {
        double acc = costs.cost(cuts.empty() ? 0 : cuts.back(), m);
        for (std::size_t k = cuts.size(); k-- > 0;) {
            const std::size_t begin = k == 0 ? 0 : cuts[k - 1];
            acc = costs.cost(begin, cuts[k]) + acc;
        }
        if (acc < best.E) {
            best.E = acc;
            best.thresholds.clear();
            for (const std::size_t c : cuts) {
                best.thresholds.push_back(costs.threshold_before(c));
            }
        }
        // next combination in lexicographic order
        std::size_t k = cuts.size();
        while (k > 0 && cuts[k - 1] == m - (cuts.size() - (k - 1))) {
            --k;
        }
        if (k == 0) {
            break;
        }
        ++cuts[k - 1];
        for (std::size_t q = k; q < cuts.size(); ++q) {
            cuts[q] = cuts[q - 1] + 1;
        }
    }
    return best;
}

} // namespace pixclust

#endif
