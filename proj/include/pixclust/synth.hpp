#ifndef PIXCLUST_SYNTH_HPP
#define PIXCLUST_SYNTH_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixclust/image.hpp"

// Seeded synthetic test images. Only mt19937_64 raw output and integer
// arithmetic are used, so every platform produces the same pixels.

namespace pixclust::synth {

enum class Kind { Bimodal, MultiBand, Checkerboard };

inline Kind parse_kind(const std::string& name) {
    if (name == "bimodal") {
        return Kind::Bimodal;
    }
    if (name == "multiband") {
        return Kind::MultiBand;
    }
    if (name == "checker") {
        return Kind::Checkerboard;
    }
    throw std::invalid_argument("unknown synthetic image kind '" + name + "' (bimodal, multiband, checker)");
}

inline std::string kind_name(Kind k) {
    switch (k) {
    case Kind::Bimodal:
        return "bimodal";
    case Kind::MultiBand:
        return "multiband";
    case Kind::Checkerboard:
        return "checker";
    }
    return "";
}

class Noise {
public:
    explicit Noise(std::uint64_t seed) : rng_(seed) {}

    /// Integer in [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<std::int64_t>(rng_() % span);
    }

    /// Sum of four uniforms in [−spread, spread]: a bell-shaped integer deviate.
    std::int64_t bell(std::int64_t spread) {
        std::int64_t s = 0;
        for (int i = 0; i < 4; ++i) {
            s += uniform(-spread, spread);
        }
        return s / 2;
    }

private:
    std::mt19937_64 rng_;
};

namespace detail {

inline Intensity clamp_level(std::int64_t v, std::uint32_t levels) {
    return static_cast<Intensity>(std::clamp<std::int64_t>(v, 0, static_cast<std::int64_t>(levels) - 1));
}

// Base values are given on a 0-255 scale and stretched to the level count.
inline std::int64_t scaled(std::int64_t v255, std::uint32_t levels) {
    return v255 * (static_cast<std::int64_t>(levels) - 1) / 255;
}

} // namespace detail

/// Dark background with a bright disk, plus noise.
inline Image bimodal(std::uint32_t w, std::uint32_t h, std::uint32_t levels, std::uint64_t seed) {
    Image img(w, h, levels);
    Noise noise(seed);
    const std::int64_t cx = w / 2;
    const std::int64_t cy = h / 2;
    const std::int64_t r = std::min(w, h) / 3;
    const std::int64_t spread = std::max<std::int64_t>(1, detail::scaled(14, levels));
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const std::int64_t dx = static_cast<std::int64_t>(x) - cx;
            const std::int64_t dy = static_cast<std::int64_t>(y) - cy;
            const std::int64_t base = dx * dx + dy * dy <= r * r ? 185 : 65;
            img.at(x, y) = detail::clamp_level(detail::scaled(base, levels) + noise.bell(spread), levels);
        }
    }
    return img;
}

/// Horizontal bands of five gray levels with a soft vertical gradient and noise.
inline Image multi_band(std::uint32_t w, std::uint32_t h, std::uint32_t levels, std::uint64_t seed) {
    Image img(w, h, levels);
    Noise noise(seed);
    static constexpr std::int64_t bands[] = {30, 85, 135, 180, 225};
    const std::int64_t spread = std::max<std::int64_t>(1, detail::scaled(10, levels));
    for (std::uint32_t y = 0; y < h; ++y) {
        const std::size_t band = std::min<std::size_t>(4, std::size_t{y} * 5 / h);
        for (std::uint32_t x = 0; x < w; ++x) {
            const std::int64_t ramp = static_cast<std::int64_t>(x) * 16 / static_cast<std::int64_t>(w) - 8;
            img.at(x, y) =
                detail::clamp_level(detail::scaled(bands[band] + ramp, levels) + noise.bell(spread), levels);
        }
    }
    return img;
}

/// 8-pixel checkerboard of two grays with noise.
inline Image checkerboard(std::uint32_t w, std::uint32_t h, std::uint32_t levels, std::uint64_t seed) {
    Image img(w, h, levels);
    Noise noise(seed);
    const std::int64_t spread = std::max<std::int64_t>(1, detail::scaled(20, levels));
    for (std::uint32_t y = 0; y < h; ++y) {
        for (std::uint32_t x = 0; x < w; ++x) {
            const std::int64_t base = ((x / 8) + (y / 8)) % 2 == 0 ? 90 : 165;
            img.at(x, y) = detail::clamp_level(detail::scaled(base, levels) + noise.bell(spread), levels);
        }
    }
    return img;
}

inline Image generate(Kind kind, std::uint32_t w, std::uint32_t h, std::uint32_t levels, std::uint64_t seed) {
    switch (kind) {
    case Kind::Bimodal:
        return bimodal(w, h, levels, seed);
    case Kind::MultiBand:
        return multi_band(w, h, levels, seed);
    case Kind::Checkerboard:
        return checkerboard(w, h, levels, seed);
    }
    throw std::invalid_argument("unknown synthetic image kind");
}

/// The three images used by the test suites: 64×64, 256 levels, fixed seeds.
inline std::vector<std::pair<std::string, Image>> bundled() {
    return {{"bimodal", bimodal(64, 64, 256, 1)},
            {"multiband", multi_band(64, 64, 256, 2)},
            {"checker", checkerboard(64, 64, 256, 3)}};
}

} // namespace pixclust::synth

#endif
