#ifndef PIXCLUST_HISTOGRAM_HPP
#define PIXCLUST_HISTOGRAM_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/image.hpp"

namespace pixclust {

/**
 * Intensity histogram with prefix sums of counts, v·counts and v²·counts,
 * so the stats of any intensity range come out in O(1).
 */
class Histogram {
public:
    Histogram() = default;

    explicit Histogram(std::uint32_t levels) : counts_(levels, 0) { rebuild(); }

    Histogram(std::uint32_t levels, std::span<const Intensity> pixels) : counts_(levels, 0) {
        for (const Intensity p : pixels) {
            if (p >= levels) {
                throw std::invalid_argument("histogram: pixel value out of range");
            }
            ++counts_[p];
        }
        rebuild();
    }

    /// From explicit bin counts.
    static Histogram from_counts(std::vector<std::uint64_t> counts) {
        Histogram h;
        h.counts_ = std::move(counts);
        h.rebuild();
        return h;
    }

    std::uint32_t levels() const { return static_cast<std::uint32_t>(counts_.size()); }
    std::uint64_t count(Intensity v) const { return counts_[v]; }
    const std::vector<std::uint64_t>& counts() const { return counts_; }
    std::uint64_t total() const { return prefix_n_.back(); }

    /// Intensities with at least one pixel, ascending.
    const std::vector<Intensity>& populated() const { return populated_; }

    /// Stats of the pixels with intensity in [a, b).
    ClusterStats range_stats(std::uint32_t a, std::uint32_t b) const {
        if (a > b || b > counts_.size()) {
            throw std::out_of_range("histogram range out of bounds");
        }
        return {prefix_n_[b] - prefix_n_[a], prefix_s_[b] - prefix_s_[a], prefix_s2_[b] - prefix_s2_[a]};
    }

    ClusterStats bin_stats(Intensity v) const { return ClusterStats::of_value(v, counts_[v]); }

private:
    void rebuild() {
        const std::size_t l = counts_.size();
        prefix_n_.assign(l + 1, 0);
        prefix_s_.assign(l + 1, 0);
        prefix_s2_.assign(l + 1, 0);
        populated_.clear();
        for (std::size_t v = 0; v < l; ++v) {
            const std::uint64_t c = counts_[v];
            prefix_n_[v + 1] = prefix_n_[v] + c;
            prefix_s_[v + 1] = prefix_s_[v] + c * v;
            prefix_s2_[v + 1] = prefix_s2_[v] + static_cast<wide_uint>(v * v) * c;
            if (c > 0) {
                populated_.push_back(static_cast<Intensity>(v));
            }
        }
    }

    std::vector<std::uint64_t> counts_;
    std::vector<std::uint64_t> prefix_n_{0};
    std::vector<std::uint64_t> prefix_s_{0};
    std::vector<wide_uint> prefix_s2_{0};
    std::vector<Intensity> populated_;
};

inline Histogram build_histogram(const Image& image) { return Histogram(image.levels, image.pixels); }

/// Pixel labels from a per-intensity label table.
inline std::vector<Label> labels_from_levels(const Image& image, std::span<const Label> level_labels) {
    std::vector<Label> out(image.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = level_labels[image.pixels[i]];
    }
    return out;
}

} // namespace pixclust

#endif
