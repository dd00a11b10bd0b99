#ifndef PIXCLUST_IMAGEIO_HPP
#define PIXCLUST_IMAGEIO_HPP

#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/image.hpp"
#include "pixclust/sequence.hpp"

namespace pixclust {

class PgmError : public std::runtime_error {
public:
    enum class Kind { MalformedHeader, TruncatedRaster, MaxvalOutOfRange, BadSample, Io };

    PgmError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

namespace detail {

class PgmCursor {
public:
    explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    /// Next unsigned decimal token; nullopt-like failure reported through `ok`.
    bool read_uint(std::uint64_t& out) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        out = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            out = out * 10 + static_cast<std::uint64_t>(bytes_[pos_] - '0');
            if (out > 0xFFFFFFFFull) {
                return false;
            }
            ++pos_;
        }
        return pos_ > start;
    }

    std::size_t pos() const { return pos_; }
    void advance(std::size_t n) { pos_ += n; }
    std::size_t remaining() const { return bytes_.size() - pos_; }
    char peek() const { return bytes_[pos_]; }
    bool at_end() const { return pos_ >= bytes_.size(); }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

/**
 * Parses a binary (P5) or ASCII (P2) PGM. Samples wider than one byte are
 * big-endian; the level count is maxval + 1.
 */
inline Image read_pgm(std::string_view bytes) {
    using K = PgmError::Kind;
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
        throw PgmError(K::MalformedHeader, "PGM: missing P2/P5 magic number");
    }
    const bool binary = bytes[1] == '5';
    detail::PgmCursor cur(bytes);
    cur.advance(2);
    if (!cur.at_end() && !std::isspace(static_cast<unsigned char>(cur.peek())) && cur.peek() != '#') {
        throw PgmError(K::MalformedHeader, "PGM: magic number must be followed by whitespace");
    }
    std::uint64_t width = 0;
    std::uint64_t height = 0;
    std::uint64_t maxval = 0;
    if (!cur.read_uint(width) || !cur.read_uint(height)) {
        throw PgmError(K::MalformedHeader, "PGM: malformed width/height");
    }
    if (width == 0 || height == 0) {
        throw PgmError(K::MalformedHeader, "PGM: width and height must be positive");
    }
    if (!cur.read_uint(maxval)) {
        throw PgmError(K::MalformedHeader, "PGM: malformed maxval");
    }
    if (maxval < 1 || maxval > 65535) {
        throw PgmError(K::MaxvalOutOfRange, "PGM: maxval " + std::to_string(maxval) + " outside [1, 65535]");
    }
    const std::size_t n = static_cast<std::size_t>(width * height);
    std::vector<Intensity> pixels(n);

    if (binary) {
        if (cur.at_end() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
            throw PgmError(K::MalformedHeader, "PGM: expected a single whitespace before the raster");
        }
        cur.advance(1);
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        if (cur.remaining() < n * bytes_per) {
            throw PgmError(K::TruncatedRaster, "PGM: raster holds " + std::to_string(cur.remaining()) +
                                                   " bytes, expected " + std::to_string(n * bytes_per));
        }
        const auto* raster = reinterpret_cast<const unsigned char*>(bytes.data() + cur.pos());
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t v = bytes_per == 2 ? (std::uint32_t{raster[2 * i]} << 8) | raster[2 * i + 1]
                                                   : std::uint32_t{raster[i]};
            if (v > maxval) {
                throw PgmError(K::BadSample, "PGM: sample " + std::to_string(v) + " exceeds maxval");
            }
            pixels[i] = static_cast<Intensity>(v);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            std::uint64_t v = 0;
            if (!cur.read_uint(v)) {
                throw PgmError(K::TruncatedRaster,
                               "PGM: raster ends after " + std::to_string(i) + " of " + std::to_string(n) + " samples");
            }
            if (v > maxval) {
                throw PgmError(K::BadSample, "PGM: sample " + std::to_string(v) + " exceeds maxval");
            }
            pixels[i] = static_cast<Intensity>(v);
        }
    }
    return Image(static_cast<std::uint32_t>(width), static_cast<std::uint32_t>(height),
                 static_cast<std::uint32_t>(maxval + 1), std::move(pixels));
}

/// Canonical P5: "P5\n<w> <h>\n<maxval>\n" then the raster, maxval = L − 1.
inline std::string write_pgm(const Image& image) {
    image.validate();
    const std::uint32_t maxval = image.levels - 1;
    std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n" +
                      std::to_string(maxval) + "\n";
    const bool wide = maxval > 255;
    out.reserve(out.size() + image.size() * (wide ? 2 : 1));
    for (const Intensity p : image.pixels) {
        if (wide) {
            out.push_back(static_cast<char>(p >> 8));
        }
        out.push_back(static_cast<char>(p & 0xFF));
    }
    return out;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw PgmError(PgmError::Kind::Io, "cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw PgmError(PgmError::Kind::Io, "cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw PgmError(PgmError::Kind::Io, "write failed for " + path.string());
    }
}

inline Image load_pgm(const std::filesystem::path& path) { return read_pgm(read_file(path)); }
inline void save_pgm(const std::filesystem::path& path, const Image& image) { write_file(path, write_pgm(image)); }

/// Every pixel painted with its cluster mean, rounded half-up.
inline Image render_partition(const Partition& p, const Image& image) {
    if (p.pixel_count() != image.size()) {
        throw std::invalid_argument("render_partition: partition does not cover the image");
    }
    std::vector<Intensity> paint(p.g());
    for (Label c = 0; c < p.g(); ++c) {
        const ClusterStats& s = p.cluster(c);
        paint[c] = static_cast<Intensity>((2 * s.sum + s.n) / (2 * s.n));
    }
    Image out = image;
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        out.pixels[i] = paint[p.labels()[i]];
    }
    return out;
}

struct CurveRecord {
    std::string pipeline;
    ApproxRecord record;
};

inline std::vector<CurveRecord> tag_records(const std::string& pipeline, const ApproximationSequence& seq) {
    std::vector<CurveRecord> out;
    out.reserve(seq.records.size());
    for (const auto& r : seq.records) {
        out.push_back({pipeline, r});
    }
    return out;
}

namespace detail {

inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace detail

/// CSV with header "pipeline,g,E,sigma,segment_count"; reals printed with 12 significant digits.
inline std::string write_curve_csv(std::span<const CurveRecord> records) {
    std::string out = "pipeline,g,E,sigma,segment_count\n";
    for (const auto& c : records) {
        out += c.pipeline;
        out += ',';
        out += std::to_string(c.record.g);
        out += ',';
        out += detail::format_real(c.record.E);
        out += ',';
        out += detail::format_real(c.record.sigma);
        out += ',';
        if (c.record.segment_count) {
            out += std::to_string(*c.record.segment_count);
        }
        out += '\n';
    }
    return out;
}

} // namespace pixclust

#endif
