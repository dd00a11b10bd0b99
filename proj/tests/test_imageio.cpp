#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pixclust/clustering.hpp"
#include "pixclust/imageio.hpp"
#include "pixclust/synth.hpp"
#include "support.hpp"

using namespace pixclust;
using testing_support::row_image;

namespace {

PgmError::Kind error_kind(const std::string& bytes) {
    try {
        (void)read_pgm(bytes);
    } catch (const PgmError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no PgmError for input of " << bytes.size() << " bytes";
    return PgmError::Kind::Io;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST(ReadPgm, MinimalAscii) {
    const Image img = read_pgm("P2\n1 1\n255\n7\n");
    EXPECT_EQ(img.width, 1u);
    EXPECT_EQ(img.height, 1u);
    EXPECT_EQ(img.levels, 256u);
    EXPECT_EQ(img.pixels, std::vector<Intensity>{7});
}

TEST(ReadPgm, CommentsAndLooseWhitespace) {
    const Image img = read_pgm("P2 # comment\n# another\n 3\t1 # w h\n15\n1 2\n\n 3");
    EXPECT_EQ(img.levels, 16u);
    EXPECT_EQ(img.pixels, (std::vector<Intensity>{1, 2, 3}));
}

TEST(ReadPgm, SixteenBitBigEndian) {
    std::string bytes = "P5\n2 1\n65535\n";
    bytes += std::string("\x01\x02\xff\xfe", 4);
    const Image img = read_pgm(bytes);
    EXPECT_EQ(img.levels, 65536u);
    EXPECT_EQ(img.pixels[0], 256 * 1 + 2);
    EXPECT_EQ(img.pixels[1], 256 * 255 + 254);
}

TEST(ReadPgm, ErrorKinds) {
    using K = PgmError::Kind;
    EXPECT_EQ(error_kind(""), K::MalformedHeader);
    EXPECT_EQ(error_kind("P6\n1 1\n255\n\x01"), K::MalformedHeader);
    EXPECT_EQ(error_kind("P5\n0 1\n255\n"), K::MalformedHeader);
    EXPECT_EQ(error_kind("P5\nx 1\n255\n"), K::MalformedHeader);
    EXPECT_EQ(error_kind("P5\n2 2\n255\n\x01\x02"), K::TruncatedRaster);
    EXPECT_EQ(error_kind("P2\n2 2\n255\n1 2 3"), K::TruncatedRaster);
    EXPECT_EQ(error_kind("P5\n1 1\n0\n\x00"), K::MaxvalOutOfRange);
    EXPECT_EQ(error_kind("P5\n1 1\n70000\n\x00\x00"), K::MaxvalOutOfRange);
    EXPECT_EQ(error_kind("P2\n1 1\n9\n10"), K::BadSample);
    EXPECT_EQ(error_kind(std::string("P5\n1 1\n300\n\x01\x2d", 13)), K::BadSample);
    EXPECT_THROW((void)load_pgm("/nonexistent/dir/none.pgm"), PgmError);
}

TEST(WritePgm, CanonicalHeader) {
    const Image img(2, 2, 256, {0, 1, 2, 255});
    const std::string bytes = write_pgm(img);
    EXPECT_EQ(bytes.rfind("P5\n2 2\n255\n", 0), 0u);
    EXPECT_EQ(bytes.size(), 11u + 4u);
    EXPECT_EQ(read_pgm(bytes), img);
}

TEST(WritePgm, RejectsEmptyImages) {
    Image img;
    img.width = 0;
    img.height = 3;
    EXPECT_THROW((void)write_pgm(img), std::invalid_argument);
    EXPECT_THROW(Image(0, 1, 256), std::invalid_argument);
    EXPECT_THROW(Image(1, 1, 4, {4}), std::invalid_argument);
}

TEST(WritePgm, RandomRoundTrips) {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 500; ++trial) {
        const std::uint32_t levels = trial % 3 == 0 ? static_cast<std::uint32_t>(257 + rng() % 65280)
                                                    : static_cast<std::uint32_t>(2 + rng() % 255);
        const Image img = [&] {
            const auto w = static_cast<std::uint32_t>(1 + rng() % 20);
            const auto h = static_cast<std::uint32_t>(1 + rng() % 20);
            std::vector<Intensity> px(std::size_t{w} * h);
            for (auto& p : px) {
                p = static_cast<Intensity>(rng() % levels);
            }
            return Image(w, h, levels, std::move(px));
        }();
        const std::string bytes = write_pgm(img);
        const Image back = read_pgm(bytes);
        ASSERT_EQ(back, img);
        EXPECT_EQ(write_pgm(back), bytes);
    }
}

TEST(RenderPartition, Examples) {
    const Image img = row_image({0, 0, 10, 10}, 11);
    const Image one = render_partition(Partition::single(img), img);
    EXPECT_EQ(one.pixels, std::vector<Intensity>(4, 5));

    EXPECT_EQ(render_partition(Partition(img, {0, 0, 1, 1}), img), img);

    const Image half = row_image({4, 5}, 11);
    EXPECT_EQ(render_partition(Partition::single(half), half).pixels, (std::vector<Intensity>{5, 5}));
}

TEST(RenderPartition, FullCutReconstructsTheImage) {
    for (const auto& [name, img] : synth::bundled()) {
        const Dendrogram d = build_compact_representation(img);
        const std::size_t leaves = build_histogram(img).populated().size();
        EXPECT_EQ(render_partition(cut_dendrogram(d, leaves, img), img), img) << name;
    }
}

TEST(CurveCsv, HeaderAndRecords) {
    EXPECT_EQ(write_curve_csv({}), "pipeline,g,E,sigma,segment_count\n");

    ApproximationSequence seq(4);
    seq.push(1, 100.0);
    const std::string one = write_curve_csv(tag_records("split", seq));
    EXPECT_EQ(split_lines(one).size(), 2u);
    EXPECT_EQ(split_lines(one)[1], "split,1,100,5,");

    ApproximationSequence with_segments(3);
    with_segments.push(2, 2.0 / 3.0, 7);
    EXPECT_EQ(split_lines(write_curve_csv(tag_records("ms-merge", with_segments)))[1],
              "ms-merge,2,0.666666666667,0.471404520791,7");
}

TEST(CurveCsv, SigmaColumnIsRecomputable) {
    const Image img = synth::multi_band(32, 32, 256, 3);
    const auto seq = expand_to_sequence(build_compact_representation(img), 40).sequence;
    const auto lines = split_lines(write_curve_csv(tag_records("split", seq)));
    ASSERT_EQ(lines.size(), seq.size() + 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream row(lines[i]);
        std::string tag, g, e, sigma;
        std::getline(row, tag, ',');
        std::getline(row, g, ',');
        std::getline(row, e, ',');
        std::getline(row, sigma, ',');
        const double expected = std::sqrt(std::stod(e) / static_cast<double>(img.size()));
        EXPECT_NEAR(std::stod(sigma), expected, 1e-10 * std::max(1.0, expected));
    }
}

TEST(Golden, SplitRenderOfBimodal) {
    const Image img = synth::bimodal(64, 64, 256, 1);
    const Image out = render_partition(cut_dendrogram(build_compact_representation(img), 4, img), img);
    const std::string expected = read_file(std::string(PIXCLUST_TEST_DATA) + "/bimodal_split_g4.pgm");
    EXPECT_TRUE(write_pgm(out) == expected) << "rendered bytes differ from the golden file";
}
