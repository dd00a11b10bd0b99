#ifndef PIXCLUST_PIPELINES_HPP
#define PIXCLUST_PIPELINES_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "pixclust/clustering.hpp"
#include "pixclust/correction.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/optimal.hpp"
#include "pixclust/segments.hpp"
#include "pixclust/sequence.hpp"

// Named end-to-end pipelines shared by the CLI and the verification suite.

namespace pixclust {

enum class Pipeline { Split, MergeAll, MergeAdjacent, Optimal, KMeans, Correct, Reduce, ConnectedMerge };

inline Pipeline parse_pipeline(const std::string& name) {
    if (name == "split") return Pipeline::Split;
    if (name == "merge-all") return Pipeline::MergeAll;
    if (name == "merge-adjacent") return Pipeline::MergeAdjacent;
    if (name == "optimal") return Pipeline::Optimal;
    if (name == "kmeans") return Pipeline::KMeans;
    if (name == "correct") return Pipeline::Correct;
    if (name == "reduce") return Pipeline::Reduce;
    if (name == "ms-merge") return Pipeline::ConnectedMerge;
    throw std::invalid_argument("unknown pipeline '" + name + "'");
}

inline std::string pipeline_name(Pipeline p) {
    switch (p) {
    case Pipeline::Split: return "split";
    case Pipeline::MergeAll: return "merge-all";
    case Pipeline::MergeAdjacent: return "merge-adjacent";
    case Pipeline::Optimal: return "optimal";
    case Pipeline::KMeans: return "kmeans";
    case Pipeline::Correct: return "correct";
    case Pipeline::Reduce: return "reduce";
    case Pipeline::ConnectedMerge: return "ms-merge";
    }
    return "";
}

struct PipelineOptions {
    StoppingCondition stop = StoppingCondition::one_segment();
    /// Reduce each quasioptimal partition afterwards instead of after every split.
    bool global_reduce = false;
    std::uint32_t max_depth = 16;
};

namespace detail {

inline Dendrogram pipeline_dendrogram(Pipeline p, const Image& image, const PipelineOptions& opt) {
    const Histogram h = build_histogram(image);
    switch (p) {
    case Pipeline::MergeAll: return greedy_merge_all_pairs(h);
    case Pipeline::MergeAdjacent: return greedy_merge_adjacent_bins(h);
    default: return build_compact_representation(h, opt.max_depth);
    }
}

// Correction or Lloyd refinement of every top-down partition.
template <typename Refine>
ApproximationSequence refined_sequence(const Image& image, std::size_t g_max, const PipelineOptions& opt,
                                       Refine refine) {
    const Dendrogram d = build_compact_representation(image, opt.max_depth);
    ExpansionCursor cursor(d);
    ApproximationSequence seq(image.size());
    while (true) {
        const Partition p(image, labels_from_levels(image, cursor.level_labels()));
        seq.push(cursor.g(), refine(p).total_error());
        if (cursor.g() >= g_max || cursor.done()) {
            break;
        }
        cursor.step();
    }
    if (cursor.g() < g_max) {
        seq.warning = "hierarchy exhausted at g = " + std::to_string(cursor.g());
    }
    return seq;
}

} // namespace detail

/// E-vs-g curve of a pipeline for g up to g_max (segment counts for ms-merge).
inline ApproximationSequence run_pipeline(Pipeline p, const Image& image, std::size_t g_max,
                                          const PipelineOptions& opt = {}) {
    switch (p) {
    case Pipeline::Split:
    case Pipeline::MergeAll:
    case Pipeline::MergeAdjacent:
        return expand_to_sequence(detail::pipeline_dendrogram(p, image, opt), g_max).sequence;
    case Pipeline::Optimal:
        return optimal_sequence(build_histogram(image), g_max);
    case Pipeline::Correct:
        return detail::refined_sequence(image, g_max, opt,
                                        [&](const Partition& q) { return correct_partition(q, image); });
    case Pipeline::KMeans:
        return detail::refined_sequence(image, g_max, opt, [&](const Partition& q) { return kmeans(q, image); });
    case Pipeline::Reduce:
        return opt.global_reduce ? reduced_sequence_post_pass(image, g_max, opt.stop)
                                 : reduced_sequence(image, g_max, opt.stop);
    case Pipeline::ConnectedMerge:
        return merge_connected_segments(image, 1, g_max);
    }
    throw std::invalid_argument("unknown pipeline");
}

/// The pipeline's partition into g clusters (g segments for ms-merge).
inline Partition pipeline_partition(Pipeline p, const Image& image, std::size_t g, const PipelineOptions& opt = {}) {
    switch (p) {
    case Pipeline::Split:
    case Pipeline::MergeAll:
    case Pipeline::MergeAdjacent:
        return cut_dendrogram(detail::pipeline_dendrogram(p, image, opt), g, image);
    case Pipeline::Optimal: {
        const ThresholdSet t = optimal_partition(build_histogram(image), g);
        return Partition(image, labels_from_levels(image, t.level_labels(image.levels)));
    }
    case Pipeline::Correct:
        return correct_partition(cut_dendrogram(build_compact_representation(image, opt.max_depth), g, image), image);
    case Pipeline::KMeans:
        return kmeans(cut_dendrogram(build_compact_representation(image, opt.max_depth), g, image), image);
    case Pipeline::Reduce:
        if (opt.global_reduce) {
            const Partition q = cut_dendrogram(build_compact_representation(image, opt.max_depth), g, image);
            return reduce_segments(q, image, opt.stop).partition;
        }
        return reduced_partition(image, g, opt.stop);
    case Pipeline::ConnectedMerge:
        return connected_merge_partition(image, g);
    }
    throw std::invalid_argument("unknown pipeline");
}

/// Keeps records with g ≥ g_min.
inline ApproximationSequence restrict_from(ApproximationSequence seq, std::size_t g_min) {
    std::erase_if(seq.records, [&](const ApproxRecord& r) { return r.g < g_min; });
    return seq;
}

} // namespace pixclust

#endif
