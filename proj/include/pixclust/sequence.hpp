#ifndef PIXCLUST_SEQUENCE_HPP
#define PIXCLUST_SEQUENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixclust {

struct ApproxRecord {
    std::size_t g = 0;
    double E = 0.0;
    double sigma = 0.0;
    std::optional<std::size_t> segment_count;
};

/// E-vs-g curve of one pipeline, with g strictly increasing.
struct ApproximationSequence {
    std::uint64_t pixel_count = 0;
    std::vector<ApproxRecord> records;
    /// Set when the requested g range could not be reached.
    std::optional<std::string> warning;

    explicit ApproximationSequence(std::uint64_t n = 0) : pixel_count(n) {}

    void push(std::size_t g, double E, std::optional<std::size_t> segments = std::nullopt) {
        if (!records.empty() && g <= records.back().g) {
            throw std::logic_error("approximation sequence: g must be strictly increasing");
        }
        const double clamped = E < 0.0 ? 0.0 : E;
        records.push_back({g, clamped, std::sqrt(clamped / static_cast<double>(pixel_count)), segments});
    }

    bool empty() const { return records.empty(); }
    std::size_t size() const { return records.size(); }

    const ApproxRecord* find(std::size_t g) const {
        for (const auto& r : records) {
            if (r.g == g) {
                return &r;
            }
        }
        return nullptr;
    }
};

/// g values where E(g) > (E(g−1) + E(g+1))/2 beyond `rel` of the largest of the three, over consecutive g only.
inline std::vector<std::size_t> convexity_violations(const ApproximationSequence& seq, double rel = 1e-9) {
    std::vector<std::size_t> out;
    const auto& r = seq.records;
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
        if (r[i].g != r[i - 1].g + 1 || r[i + 1].g != r[i].g + 1) {
            continue;
        }
        const double mid = 0.5 * (r[i - 1].E + r[i + 1].E);
        const double tol = rel * std::max({r[i - 1].E, r[i].E, r[i + 1].E, 1.0});
        if (r[i].E > mid + tol) {
            out.push_back(r[i].g);
        }
    }
    return out;
}

inline bool is_non_increasing(const ApproximationSequence& seq, double rel = 1e-12) {
    for (std::size_t i = 1; i < seq.records.size(); ++i) {
        const double prev = seq.records[i - 1].E;
        if (seq.records[i].E > prev + rel * std::max(prev, 1.0)) {
            return false;
        }
    }
    return true;
}

struct Divergence {
    std::size_t g = 0;
    double E_a = 0.0;
    double E_b = 0.0;
    double relative = 0.0;
};

/// g values present in both curves where E differs by more than `rel` (relative and absolute).
inline std::vector<Divergence> curve_divergence(const ApproximationSequence& a, const ApproximationSequence& b,
                                                double rel = 1e-6) {
    std::vector<Divergence> out;
    for (const auto& ra : a.records) {
        const ApproxRecord* rb = b.find(ra.g);
        if (rb == nullptr) {
            continue;
        }
        const double ref = std::max({ra.E, rb->E, 1e-300});
        const double d = std::abs(ra.E - rb->E) / ref;
        if (d > rel && std::abs(ra.E - rb->E) > rel) {
            out.push_back({ra.g, ra.E, rb->E, d});
        }
    }
    return out;
}

} // namespace pixclust

#endif
