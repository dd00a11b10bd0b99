#ifndef PIXCLUST_TESTS_SUPPORT_HPP
#define PIXCLUST_TESTS_SUPPORT_HPP

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "pixclust/image.hpp"

// Reference computations written without the library's incremental statistics.

namespace testing_support {

inline pixclust::Image row_image(std::vector<pixclust::Intensity> px, std::uint32_t levels = 256) {
    const auto w = static_cast<std::uint32_t>(px.size());
    return pixclust::Image(w, 1, levels, std::move(px));
}

/// Σ (I_p − mean of p's cluster)², computed from scratch per cluster.
inline double direct_E(std::span<const pixclust::Intensity> px, std::span<const std::uint32_t> labels) {
    std::map<std::uint32_t, std::vector<double>> groups;
    for (std::size_t i = 0; i < px.size(); ++i) {
        groups[labels[i]].push_back(px[i]);
    }
    long double total = 0.0L;
    for (const auto& [id, values] : groups) {
        long double mean = 0.0L;
        for (const double v : values) {
            mean += v;
        }
        mean /= static_cast<long double>(values.size());
        for (const double v : values) {
            total += (v - mean) * (v - mean);
        }
    }
    return static_cast<double>(total);
}

inline double direct_E(const pixclust::Image& image, std::span<const std::uint32_t> labels) {
    return direct_E(image.pixels, labels);
}

inline pixclust::Image random_image(std::mt19937_64& rng, std::uint32_t max_side, std::uint32_t max_levels) {
    const auto w = static_cast<std::uint32_t>(1 + rng() % max_side);
    const auto h = static_cast<std::uint32_t>(1 + rng() % max_side);
    const auto levels = static_cast<std::uint32_t>(2 + rng() % (max_levels - 1));
    std::vector<pixclust::Intensity> px(std::size_t{w} * h);
    for (auto& p : px) {
        p = static_cast<pixclust::Intensity>(rng() % levels);
    }
    return pixclust::Image(w, h, levels, std::move(px));
}

/// Threshold maximizing ω0·ω1·(μ0 − μ1)², evaluated in exact integer arithmetic.
/// Classes are [0, t) and [t, L); the first maximum wins.
inline std::uint32_t integer_otsu(std::span<const std::uint64_t> counts) {
    using wide = unsigned __int128;
    std::uint64_t n = 0;
    std::uint64_t s = 0;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        n += counts[v];
        s += counts[v] * v;
    }
    // ω0ω1(μ0−μ1)² ∝ (n·s0 − n0·s)² / (n0·n1); compare fractions by cross multiplication.
    std::uint32_t best_t = 0;
    wide best_num = 0;
    wide best_den = 1;
    bool have = false;
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (std::uint32_t t = 1; t < counts.size(); ++t) {
        n0 += counts[t - 1];
        s0 += counts[t - 1] * (t - 1);
        if (n0 == 0 || n0 == n) {
            continue;
        }
        const __int128 d = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * s;
        const wide num = static_cast<wide>(d < 0 ? -d : d);
        const wide sq = num * num;
        const wide den = static_cast<wide>(n0) * (n - n0);
        // sq / den > best_num / best_den; values stay small enough in the test ranges
        if (!have || sq * best_den > best_num * den) {
            best_num = sq;
            best_den = den;
            best_t = t;
            have = true;
        }
    }
    return best_t;
}

/// True when thresholds a and b give exactly the same between-class objective.
inline bool otsu_tie(std::span<const std::uint64_t> counts, std::uint32_t a, std::uint32_t b) {
    using wide = unsigned __int128;
    std::uint64_t n = 0;
    std::uint64_t s = 0;
    for (std::size_t v = 0; v < counts.size(); ++v) {
        n += counts[v];
        s += counts[v] * v;
    }
    auto objective = [&](std::uint32_t t) {
        std::uint64_t n0 = 0;
        std::uint64_t s0 = 0;
        for (std::uint32_t v = 0; v < t; ++v) {
            n0 += counts[v];
            s0 += counts[v] * v;
        }
        const __int128 d = static_cast<__int128>(n) * s0 - static_cast<__int128>(n0) * s;
        const wide num = static_cast<wide>(d < 0 ? -d : d);
        return std::pair<wide, wide>{num * num, static_cast<wide>(n0) * (n - n0)};
    };
    const auto [na, da] = objective(a);
    const auto [nb, db] = objective(b);
    return da != 0 && db != 0 && na * db == nb * da;
}

} // namespace testing_support

#endif
