#ifndef PIXCLUST_IMAGE_HPP
#define PIXCLUST_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pixclust {

using Intensity = std::uint16_t;

/// Row-major grayscale raster with `levels` intensity values 0 … levels−1.
struct Image {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t levels = 256;
    std::vector<Intensity> pixels;

    Image() = default;

    Image(std::uint32_t w, std::uint32_t h, std::uint32_t l, std::vector<Intensity> px)
        : width(w), height(h), levels(l), pixels(std::move(px)) {
        validate();
    }

    Image(std::uint32_t w, std::uint32_t h, std::uint32_t l) : Image(w, h, l, std::vector<Intensity>(std::size_t{w} * h, 0)) {}

    std::size_t size() const { return pixels.size(); }

    Intensity at(std::uint32_t x, std::uint32_t y) const { return pixels[std::size_t{y} * width + x]; }
    Intensity& at(std::uint32_t x, std::uint32_t y) { return pixels[std::size_t{y} * width + x]; }

    void validate() const {
        if (width == 0 || height == 0) {
            throw std::invalid_argument("image dimensions must be positive");
        }
        if (levels < 2 || levels > 65536) {
            throw std::invalid_argument("image level count must lie in [2, 65536], got " + std::to_string(levels));
        }
        if (pixels.size() != std::size_t{width} * height) {
            throw std::invalid_argument("pixel array does not match image dimensions");
        }
        for (const Intensity p : pixels) {
            if (p >= levels) {
                throw std::invalid_argument("pixel value " + std::to_string(p) + " exceeds level count " +
                                            std::to_string(levels));
            }
        }
    }

    friend bool operator==(const Image&, const Image&) = default;
};

} // namespace pixclust

#endif
