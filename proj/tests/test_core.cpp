#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "pixclust/core.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/sequence.hpp"
#include "support.hpp"

using namespace pixclust;
using testing_support::direct_E;
using testing_support::row_image;

namespace {

ClusterStats stats_of(std::vector<Intensity> px) { return stats_from_pixels(px); }

ClusterStats constant(Intensity v, std::uint64_t n) { return ClusterStats::of_value(v, n); }

} // namespace

TEST(ClusterStats, EmptySingletonAndHandSum) {
    const ClusterStats e = stats_of({});
    EXPECT_EQ(e.n, 0u);
    EXPECT_EQ(e.sum, 0u);
    EXPECT_TRUE(e.sum_sq == 0);
    EXPECT_EQ(e.error(), 0.0);
    EXPECT_THROW((void)e.mean(), std::logic_error);

    const ClusterStats one = stats_of({5});
    EXPECT_EQ(one.n, 1u);
    EXPECT_EQ(one.sum, 5u);
    EXPECT_TRUE(one.sum_sq == 25);

    const ClusterStats four = stats_of({0, 0, 10, 10});
    EXPECT_EQ(four.n, 4u);
    EXPECT_EQ(four.sum, 20u);
    EXPECT_TRUE(four.sum_sq == 200);
    EXPECT_DOUBLE_EQ(four.mean(), 5.0);
    EXPECT_DOUBLE_EQ(four.error(), 25.0 * 4);
}

TEST(ClusterStats, ErrorMatchesDirectSumOnRandomPixels) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Intensity> px(1 + rng() % 300);
        for (auto& p : px) {
            p = static_cast<Intensity>(rng() % 65536);
        }
        const std::vector<std::uint32_t> labels(px.size(), 0);
        const double expected = direct_E(px, labels);
        EXPECT_NEAR(stats_of(px).error(), expected, 1e-9 * std::max(1.0, expected));
    }
}

TEST(ClusterStats, ErrorIsExactForLargeWideValues) {
    // 2^20 pixels at 0 and 2^20 at 65535: E = N·(65535/2)², representable exactly.
    const ClusterStats s = merge_stats(constant(0, 1u << 20), constant(65535, 1u << 20));
    const double half = 65535.0 / 2.0;
    EXPECT_DOUBLE_EQ(s.error(), static_cast<double>(1u << 21) * half * half);
}

TEST(BruteForceE, HandExamples) {
    const Image flat = row_image({7, 7, 7});
    EXPECT_EQ(brute_force_E(flat, std::vector<Label>{0, 0, 0}), 0.0);

    const Image img = row_image({0, 0, 10, 10});
    EXPECT_DOUBLE_EQ(brute_force_E(img, std::vector<Label>{0, 0, 0, 0}), 100.0);
    EXPECT_DOUBLE_EQ(brute_force_E(img, std::vector<Label>{0, 0, 1, 1}), 0.0);
    // labels need not be dense
    EXPECT_DOUBLE_EQ(brute_force_E(img, std::vector<Label>{9, 9, 4, 4}), 0.0);
}

TEST(DeltaMerge, Examples) {
    EXPECT_DOUBLE_EQ(delta_e_merge(constant(0, 2), constant(10, 2)), 100.0);
    EXPECT_EQ(delta_e_merge(constant(42, 7), constant(42, 3)), 0.0);
    EXPECT_DOUBLE_EQ(delta_e_merge(constant(0, 1), constant(1, 1)), 0.5);
    EXPECT_THROW((void)delta_e_merge(ClusterStats{}, constant(1, 1)), std::logic_error);
}

TEST(DeltaSplit, Examples) {
    const ClusterStats parent = stats_of({0, 0, 10, 10});
    EXPECT_DOUBLE_EQ(delta_e_split(parent, constant(10, 2)), -100.0);
    EXPECT_EQ(delta_e_split(stats_of({3, 5, 7}), constant(5, 1)), 0.0);
    EXPECT_DOUBLE_EQ(delta_e_split(stats_of({0, 1}), constant(0, 1)), -0.5);
    EXPECT_THROW((void)delta_e_split(parent, parent), std::logic_error);
    EXPECT_THROW((void)delta_e_split(parent, ClusterStats{}), std::logic_error);
}

TEST(DeltaCorrect, Examples) {
    EXPECT_EQ(delta_e_correct(constant(4, 5), constant(4, 2), constant(4, 3)), 0.0);

    EXPECT_DOUBLE_EQ(delta_e_correct(stats_of({0, 0, 10, 10}), constant(10, 2), constant(10, 3)), -100.0);

    // donor {0,0,5}, moved {5}, acceptor {10}: compare with the two labelings directly
    const Image img = row_image({0, 0, 5, 10});
    const std::vector<std::uint32_t> before{0, 0, 0, 1};
    const std::vector<std::uint32_t> after{0, 0, 1, 1};
    const double expected = direct_E(img, after) - direct_E(img, before);
    EXPECT_NEAR(delta_e_correct(stats_of({0, 0, 5}), constant(5, 1), constant(10, 1)), expected, 1e-12);
}

TEST(MergeRemove, GroupInverse) {
    const ClusterStats five = constant(5, 1);
    const ClusterStats two = merge_stats(five, five);
    EXPECT_EQ(two, (ClusterStats{2, 10, 50}));
    EXPECT_EQ(remove_stats(ClusterStats{4, 20, 200}, ClusterStats{2, 20, 200}), (ClusterStats{2, 0, 0}));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const ClusterStats a = constant(static_cast<Intensity>(rng()), 1 + rng() % 1000);
        const ClusterStats b = constant(static_cast<Intensity>(rng()), 1 + rng() % 1000);
        EXPECT_EQ(remove_stats(merge_stats(a, b), b), a);
    }
    EXPECT_THROW((void)remove_stats(five, two), std::logic_error);
}

TEST(Increments, DualityAndDecompositionAreBitwise) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 2000; ++i) {
        ClusterStats a;
        ClusterStats b;
        const int ka = 1 + static_cast<int>(rng() % 4);
        const int kb = 1 + static_cast<int>(rng() % 4);
        for (int k = 0; k < ka; ++k) {
            a = merge_stats(a, constant(static_cast<Intensity>(rng() % 256), 1 + rng() % 50));
        }
        for (int k = 0; k < kb; ++k) {
            b = merge_stats(b, constant(static_cast<Intensity>(rng() % 256), 1 + rng() % 50));
        }
        const double merge = delta_e_merge(a, b);
        EXPECT_GE(merge, 0.0);
        EXPECT_EQ(delta_e_split(merge_stats(a, b), a), -merge);
        EXPECT_EQ(delta_e_split(merge_stats(a, b), b), -merge);
        EXPECT_DOUBLE_EQ(merge_stats(a, b).error(), a.error() + b.error() + merge);
    }
}

TEST(Partition, DenseLabelsAndTotals) {
    const Image img = row_image({0, 0, 10, 10, 4});
    const Partition p(img, {1, 1, 0, 0, 2});
    EXPECT_EQ(p.g(), 3u);
    EXPECT_EQ(p.cluster(1).sum, 0u);
    EXPECT_EQ(p.cluster(0).sum, 20u);
    std::uint64_t n = 0;
    for (const auto& c : p.clusters()) {
        n += c.n;
    }
    EXPECT_EQ(n, img.size());
    EXPECT_DOUBLE_EQ(p.total_error(), brute_force_E(img, p.labels()));

    EXPECT_THROW(Partition(img, {0, 0, 2, 2, 2}), std::invalid_argument);
    EXPECT_THROW(Partition(img, {0, 0}), std::invalid_argument);
}

TEST(Partition, TotalErrorMatchesOracleOnRandomLabelings) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
        const Image img = testing_support::random_image(rng, 24, 256);
        const Label k = static_cast<Label>(1 + rng() % 6);
        std::vector<Label> labels(img.size());
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = i < k ? static_cast<Label>(i) : static_cast<Label>(rng() % k);
        }
        if (img.size() < k) {
            continue;
        }
        const Partition p(img, labels);
        const double oracle = direct_E(img, labels);
        EXPECT_TRUE(approx_equal(p.total_error(), oracle, 1e-9)) << p.total_error() << " vs " << oracle;
    }
}

TEST(Refines, LabelContainment) {
    const std::vector<Label> coarse{0, 0, 1, 1};
    EXPECT_TRUE(refines(std::vector<Label>{0, 2, 1, 1}, coarse));
    EXPECT_TRUE(refines(coarse, coarse));
    EXPECT_FALSE(refines(std::vector<Label>{0, 1, 1, 2}, coarse));
}

TEST(Histogram, CountsAndRangeStats) {
    const Image img(2, 2, 11, {0, 0, 10, 10});
    const Histogram h = build_histogram(img);
    for (std::uint32_t v = 0; v < 11; ++v) {
        EXPECT_EQ(h.count(static_cast<Intensity>(v)), v == 0 || v == 10 ? 2u : 0u);
    }
    EXPECT_EQ(h.range_stats(0, 11), (ClusterStats{4, 20, 200}));
    EXPECT_EQ(h.total(), 4u);

    const Histogram flat = build_histogram(Image(3, 3, 256, std::vector<Intensity>(9, 77)));
    EXPECT_EQ(flat.populated().size(), 1u);
}

TEST(Histogram, RangeStatsMatchPixelStats) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        const Image img = testing_support::random_image(rng, 16, 64);
        const Histogram h = build_histogram(img);
        const auto a = static_cast<std::uint32_t>(rng() % img.levels);
        const auto b = static_cast<std::uint32_t>(a + rng() % (img.levels - a + 1));
        std::vector<Intensity> inside;
        for (const Intensity p : img.pixels) {
            if (p >= a && p < b) {
                inside.push_back(p);
            }
        }
        EXPECT_EQ(h.range_stats(a, b), stats_from_pixels(inside));
    }
}

TEST(Sequence, SigmaAndOrdering) {
    ApproximationSequence seq(4);
    seq.push(1, 100.0);
    seq.push(2, 0.0);
    EXPECT_DOUBLE_EQ(seq.records[0].sigma, 5.0);
    EXPECT_THROW(seq.push(2, 0.0), std::logic_error);
    EXPECT_TRUE(is_non_increasing(seq));
}

TEST(Sequence, ConvexityViolationsUseNeighbours) {
    ApproximationSequence seq(10);
    for (const auto& [g, e] : std::vector<std::pair<int, double>>{{1, 100}, {2, 40}, {3, 30}, {4, 5}, {5, 0}}) {
        seq.push(g, e);
    }
    // E3 = 30 > (40 + 5)/2 = 22.5 is the only violation
    EXPECT_EQ(convexity_violations(seq), std::vector<std::size_t>{3});
}
