#ifndef PIXCLUST_VERIFY_HPP
#define PIXCLUST_VERIFY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pixclust/clustering.hpp"
#include "pixclust/core.hpp"
#include "pixclust/histogram.hpp"
#include "pixclust/optimal.hpp"
#include "pixclust/pipelines.hpp"
#include "pixclust/segments.hpp"
#include "pixclust/sequence.hpp"

/**
 * @file verify.hpp
 * @brief Invariant checks run against a single image.
 *
 * Hard checks fail the run; report checks only describe what was observed.
 */

namespace pixclust {

struct CheckResult {
    enum class Status { Pass, Fail, Report };

    std::string name;
    Status status = Status::Pass;
    std::string detail;
};

inline const char* status_name(CheckResult::Status s) {
    switch (s) {
    case CheckResult::Status::Pass: return "PASS";
    case CheckResult::Status::Fail: return "FAIL";
    case CheckResult::Status::Report: return "REPORT";
    }
    return "";
}

struct VerifyConfig {
    std::size_t g_max = 256;
    std::size_t reduce_g_max = 32;
    std::uint64_t seed = 1;
    std::size_t random_operations = 300;
};

/**
 * Classical Otsu threshold: maximizes the between-class variance ω0·ω1·(μ0 − μ1)²
 * over t, classes [0, t) and [t, L). First maximum wins. Returns 0 for a
 * single-intensity histogram.
 */
inline std::uint32_t classical_otsu_threshold(const Histogram& h) {
    const long double total = static_cast<long double>(h.total());
    long double total_sum = 0.0L;
    for (std::uint32_t v = 0; v < h.levels(); ++v) {
        total_sum += static_cast<long double>(v) * static_cast<long double>(h.count(static_cast<Intensity>(v)));
    }
    long double w0 = 0.0L;
    long double s0 = 0.0L;
    long double best = -1.0L;
    std::uint32_t best_t = 0;
    for (std::uint32_t t = 1; t < h.levels(); ++t) {
        const long double c = static_cast<long double>(h.count(static_cast<Intensity>(t - 1)));
        w0 += c;
        s0 += c * static_cast<long double>(t - 1);
        if (w0 == 0.0L || w0 == total) {
            continue;
        }
        const long double p0 = w0 / total;
        const long double p1 = 1.0L - p0;
        const long double mu0 = s0 / w0;
        const long double mu1 = (total_sum - s0) / (total - w0);
        const long double between = p0 * p1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_t = t;
        }
    }
    return best_t;
}

/// E of the two-class split of `h` at threshold t.
inline double threshold_error(const Histogram& h, std::uint32_t t) {
    return h.range_stats(0, t).error() + h.range_stats(t, h.levels()).error();
}

namespace detail {

inline std::string join_g(const std::vector<std::size_t>& gs, std::size_t limit = 8) {
    std::ostringstream os;
    for (std::size_t i = 0; i < gs.size() && i < limit; ++i) {
        os << (i ? "," : "") << gs[i];
    }
    if (gs.size() > limit) {
        os << ",...";
    }
    return os.str();
}

inline double scale_of(double a, double b) { return std::max({std::abs(a), std::abs(b), 1.0}); }

} // namespace detail

/// Random merge/split/correct operations on random labelings, each checked against brute_force_E.
inline CheckResult check_incremental_consistency(const Image& image, std::uint64_t seed, std::size_t operations) {
    CheckResult r{"incremental-consistency", CheckResult::Status::Pass, ""};
    std::mt19937_64 rng(seed);
    const std::size_t n = image.size();
    std::vector<Label> labels(n);
    std::size_t failures = 0;
    std::size_t sign_failures = 0;
    std::size_t applied = 0;
    double worst = 0.0;

    auto stats_of = [&](Label l) {
        ClusterStats s;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == l) {
                s = merge_stats(s, ClusterStats::of_value(image.pixels[i]));
            }
        }
        return s;
    };
    auto record = [&](double before, double after, double delta) {
        ++applied;
        const double err = std::abs((after - before) - delta) / detail::scale_of(before, after);
        worst = std::max(worst, err);
        if (err > 1e-9) {
            ++failures;
        }
    };

    for (std::size_t op = 0; op < operations; ++op) {
        if (op % 20 == 0) {
            const Label k = static_cast<Label>(2 + rng() % 5);
            for (auto& l : labels) {
                l = static_cast<Label>(rng() % k);
            }
        }
        Label max_label = *std::max_element(labels.begin(), labels.end());
        const Label a = static_cast<Label>(rng() % (max_label + 1));
        const Label b = static_cast<Label>(rng() % (max_label + 1));
        const ClusterStats sa = stats_of(a);
        if (sa.n < 2) {
            continue;
        }
        const double before = brute_force_E(image, labels);
        const unsigned kind = static_cast<unsigned>(rng() % 3);
        if (kind == 0) {
            const ClusterStats sb = stats_of(b);
            if (a == b || sb.n == 0) {
                continue;
            }
            const double delta = delta_e_merge(sa, sb);
            sign_failures += delta < 0.0 ? 1 : 0;
            std::replace(labels.begin(), labels.end(), b, a);
            record(before, brute_force_E(image, labels), delta);
        } else {
            // random proper nonempty subset of cluster a
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == a) {
                    members.push_back(i);
                }
            }
            std::vector<std::size_t> chosen;
            for (const std::size_t i : members) {
                if (rng() % 2 == 0) {
                    chosen.push_back(i);
                }
            }
            if (chosen.empty() || chosen.size() == members.size()) {
                continue;
            }
            ClusterStats part;
            for (const std::size_t i : chosen) {
                part = merge_stats(part, ClusterStats::of_value(image.pixels[i]));
            }
            Label target = max_label + 1;
            double delta = 0.0;
            if (kind == 1 || a == b || stats_of(b).n == 0) {
                delta = delta_e_split(sa, part);
                sign_failures += delta > 0.0 ? 1 : 0;
            } else {
                target = b;
                delta = delta_e_correct(sa, part, stats_of(b));
            }
            for (const std::size_t i : chosen) {
                labels[i] = target;
            }
            record(before, brute_force_E(image, labels), delta);
        }
    }
    std::ostringstream os;
    os << applied << " operations, worst relative error " << worst << ", " << failures << " mismatches, "
       << sign_failures << " sign violations";
    r.detail = os.str();
    if (failures > 0 || sign_failures > 0) {
        r.status = CheckResult::Status::Fail;
    }
    return r;
}

/// Split of a random part equals the negated merge of that part with the remainder.
inline CheckResult check_duality(const Image& image, std::uint64_t seed, std::size_t trials) {
    CheckResult r{"duality", CheckResult::Status::Pass, ""};
    std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
    std::size_t failures = 0;
    std::size_t done = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        ClusterStats part;
        ClusterStats rest;
        for (const Intensity p : image.pixels) {
            if (rng() % 3 == 0) {
                part = merge_stats(part, ClusterStats::of_value(p));
            } else {
                rest = merge_stats(rest, ClusterStats::of_value(p));
            }
        }
        if (part.n == 0 || rest.n == 0) {
            continue;
        }
        ++done;
        const double split = delta_e_split(merge_stats(part, rest), part);
        const double merge = delta_e_merge(part, rest);
        if (!approx_equal(split, -merge, 1e-12)) {
            ++failures;
        }
    }
    r.detail = std::to_string(done) + " pairs, " + std::to_string(failures) + " mismatches";
    if (failures > 0) {
        r.status = CheckResult::Status::Fail;
    }
    return r;
}

inline CheckResult check_otsu_agreement(const Image& image) {
    CheckResult r{"otsu-agreement", CheckResult::Status::Pass, ""};
    const Histogram h = build_histogram(image);
    if (h.populated().size() < 2) {
        r.detail = "single intensity, nothing to split";
        return r;
    }
    const BinarySplit s = best_binary_split(h);
    const std::uint32_t t = classical_otsu_threshold(h);
    if (s.threshold == t) {
        r.detail = "threshold " + std::to_string(t);
        return r;
    }
    const double es = threshold_error(h, s.threshold);
    const double et = threshold_error(h, t);
    if (approx_equal(es, et, 1e-12)) {
        r.detail = "tie between thresholds " + std::to_string(s.threshold) + " and " + std::to_string(t);
    } else {
        r.status = CheckResult::Status::Fail;
        r.detail = "split threshold " + std::to_string(s.threshold) + " vs Otsu " + std::to_string(t);
    }
    return r;
}

/// Everything the image-level suite computes once and checks several ways.
struct CurveSet {
    ApproximationSequence optimal;
    std::map<std::string, ApproximationSequence> quasi;
};

inline CurveSet compute_curves(const Image& image, std::size_t g_max) {
    CurveSet c;
    c.optimal = run_pipeline(Pipeline::Optimal, image, g_max);
    for (const Pipeline p : {Pipeline::Split, Pipeline::MergeAll, Pipeline::MergeAdjacent, Pipeline::Correct,
                             Pipeline::KMeans}) {
        c.quasi.emplace(pipeline_name(p), run_pipeline(p, image, g_max));
    }
    return c;
}

/// g values where `upper` falls below `lower` by more than 1e−9 relative.
inline std::vector<std::size_t> majorization_violations(const ApproximationSequence& lower,
                                                        const ApproximationSequence& upper) {
    std::vector<std::size_t> out;
    for (const auto& u : upper.records) {
        const ApproxRecord* l = lower.find(u.g);
        if (l != nullptr && u.E < l->E - 1e-9 * detail::scale_of(l->E, u.E)) {
            out.push_back(u.g);
        }
    }
    return out;
}

inline CheckResult check_majorization(const CurveSet& c) {
    CheckResult r{"majorization", CheckResult::Status::Pass, ""};
    std::ostringstream os;
    for (const auto& [name, seq] : c.quasi) {
        const auto bad = majorization_violations(c.optimal, seq);
        if (!bad.empty()) {
            r.status = CheckResult::Status::Fail;
            os << name << " below optimal at g=" << detail::join_g(bad) << "; ";
        }
    }
    r.detail = r.status == CheckResult::Status::Pass ? "optimal E(g) is a lower bound for every pipeline" : os.str();
    return r;
}

inline std::vector<CheckResult> check_convexity(const CurveSet& c) {
    std::vector<CheckResult> out;
    const auto opt_bad = convexity_violations(c.optimal);
    out.push_back({"convexity/optimal", opt_bad.empty() ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                   opt_bad.empty() ? "0 violations over " + std::to_string(c.optimal.size()) + " records"
                                   : std::to_string(opt_bad.size()) + " violations at g=" + detail::join_g(opt_bad)});
    for (const auto& [name, seq] : c.quasi) {
        const auto bad = convexity_violations(seq);
        out.push_back({"convexity/" + name, CheckResult::Status::Report,
                       std::to_string(bad.size()) + " violations" + (bad.empty() ? "" : " at g=" + detail::join_g(bad))});
    }
    return out;
}

inline CheckResult check_monotonicity(const CurveSet& c) {
    CheckResult r{"monotonicity", CheckResult::Status::Pass, "E non-increasing in g for every pipeline"};
    std::string bad;
    if (!is_non_increasing(c.optimal)) {
        bad += "optimal ";
    }
    for (const auto& [name, seq] : c.quasi) {
        if (!is_non_increasing(seq)) {
            bad += name + " ";
        }
    }
    if (!bad.empty()) {
        r.status = CheckResult::Status::Fail;
        r.detail = "increasing E in: " + bad;
    }
    return r;
}

/// The split pipeline's partition at g+1 refines the one at g, checked on pixel labels.
inline CheckResult check_refinement(const Image& image, std::size_t g_max) {
    CheckResult r{"refinement", CheckResult::Status::Pass, ""};
    const Dendrogram d = build_compact_representation(image);
    ExpansionCursor cursor(d);
    std::vector<Label> coarse = labels_from_levels(image, cursor.level_labels());
    std::vector<std::size_t> bad;
    while (cursor.g() < g_max && !cursor.done()) {
        cursor.step();
        std::vector<Label> fine = labels_from_levels(image, cursor.level_labels());
        if (!refines(fine, coarse)) {
            bad.push_back(cursor.g());
        }
        coarse = std::move(fine);
    }
    r.detail = "checked g = 1.." + std::to_string(cursor.g());
    if (!bad.empty()) {
        r.status = CheckResult::Status::Fail;
        r.detail = "partition at g does not refine g-1 for g=" + detail::join_g(bad);
    }
    return r;
}

/// Bottom-up and top-down curves should coincide; more than 5% apart means a bug.
inline CheckResult check_coincidence(const CurveSet& c) {
    CheckResult r{"merge-split-coincidence", CheckResult::Status::Pass, ""};
    const auto& split = c.quasi.at("split");
    std::ostringstream os;
    double worst = 0.0;
    std::size_t diverging = 0;
    for (const char* other : {"merge-all", "merge-adjacent"}) {
        const auto div = curve_divergence(split, c.quasi.at(other), 1e-6);
        diverging += div.size();
        if (!div.empty()) {
            std::vector<std::size_t> gs;
            for (const auto& d : div) {
                gs.push_back(d.g);
                worst = std::max(worst, d.relative);
            }
            os << other << " diverges at g=" << detail::join_g(gs) << "; ";
        }
    }
    const auto adj = curve_divergence(c.quasi.at("merge-all"), c.quasi.at("merge-adjacent"), 1e-6);
    for (const auto& d : adj) {
        worst = std::max(worst, d.relative);
    }
    if (diverging == 0 && adj.empty()) {
        r.detail = "split, merge-all and merge-adjacent agree within 1e-6";
        return r;
    }
    os << "worst relative gap " << worst;
    r.detail = os.str();
    r.status = worst > 0.05 ? CheckResult::Status::Fail : CheckResult::Status::Report;
    return r;
}

/// Bottom-up merge order and the top-down expansion of the same merge hierarchy give the same E(g).
inline CheckResult check_hierarchy_coincidence(const Image& image, std::size_t g_max) {
    CheckResult r{"merge-expansion-coincidence", CheckResult::Status::Pass, ""};
    const Histogram h = build_histogram(image);
    std::ostringstream os;
    const Dendrogram all = greedy_merge_all_pairs(h);
    const Dendrogram adj = greedy_merge_adjacent_bins(h);
    const std::pair<const char*, const Dendrogram*> trees[] = {{"merge-all", &all}, {"merge-adjacent", &adj}};
    for (const auto& [name, d] : trees) {
        const auto div = curve_divergence(merge_order_sequence(*d, g_max), expand_to_sequence(*d, g_max).sequence, 1e-6);
        if (!div.empty()) {
            std::vector<std::size_t> gs;
            for (const auto& x : div) {
                gs.push_back(x.g);
            }
            os << name << " merge order vs expansion differ at g=" << detail::join_g(gs) << "; ";
            r.status = CheckResult::Status::Fail;
        }
    }
    if (!merge_history(all).empty() && merge_history(all) != merge_history(adj)) {
        os << "all-pairs and adjacent-bin merge sequences differ";
        r.status = CheckResult::Status::Report;
    }
    r.detail = os.str().empty() ? "merge order = expansion within 1e-6; all-pairs and adjacent-bin hierarchies identical"
                                : os.str();
    return r;
}

/// One-segment reduction: exactly g segments and E no better than the unreduced split curve.
inline CheckResult check_segment_reduction(const Image& image, const CurveSet& c, std::size_t g_max) {
    CheckResult r{"segment-reduction", CheckResult::Status::Pass, ""};
    const ApproximationSequence red = reduced_sequence(image, g_max, StoppingCondition::one_segment());
    std::vector<std::size_t> count_bad;
    for (const auto& rec : red.records) {
        if (!rec.segment_count || *rec.segment_count != rec.g) {
            count_bad.push_back(rec.g);
        }
    }
    const auto below = majorization_violations(c.quasi.at("split"), red);
    std::ostringstream os;
    os << "g = 1.." << (red.empty() ? 0 : red.records.back().g);
    if (!count_bad.empty()) {
        os << "; segment count != g at g=" << detail::join_g(count_bad);
    }
    if (!below.empty()) {
        os << "; reduced E below split E at g=" << detail::join_g(below);
    }
    r.detail = os.str();
    if (!count_bad.empty() || !below.empty()) {
        r.status = CheckResult::Status::Fail;
    }
    return r;
}

/// Optimal ≤ quasioptimal ≤ connected-segment merging; only the first inequality is hard.
inline std::vector<CheckResult> check_connected_ordering(const Image& image, const CurveSet& c, std::size_t g_max) {
    const ApproximationSequence ms = merge_connected_segments(image, 1, g_max);
    std::vector<CheckResult> out;
    const auto below_opt = majorization_violations(c.optimal, ms);
    out.push_back({"ordering/optimal<=ms-merge",
                   below_opt.empty() ? CheckResult::Status::Pass : CheckResult::Status::Fail,
                   below_opt.empty() ? "holds at every common g" : "violated at g=" + detail::join_g(below_opt)});
    const auto below_quasi = majorization_violations(c.quasi.at("split"), ms);
    out.push_back({"ordering/split<=ms-merge", CheckResult::Status::Report,
                   below_quasi.empty() ? "holds at every common g"
                                       : std::to_string(below_quasi.size()) + " g values where ms-merge is lower: " +
                                             detail::join_g(below_quasi)});
    return out;
}

inline std::vector<CheckResult> run_verification(const Image& image, const VerifyConfig& config = {}) {
    std::vector<CheckResult> out;
    out.push_back(check_incremental_consistency(image, config.seed, config.random_operations));
    out.push_back(check_duality(image, config.seed, 100));
    out.push_back(check_otsu_agreement(image));
    const CurveSet curves = compute_curves(image, config.g_max);
    out.push_back(check_majorization(curves));
    for (auto& c : check_convexity(curves)) {
        out.push_back(std::move(c));
    }
    out.push_back(check_monotonicity(curves));
    out.push_back(check_refinement(image, config.g_max));
    out.push_back(check_coincidence(curves));
    out.push_back(check_hierarchy_coincidence(image, config.g_max));
    out.push_back(check_segment_reduction(image, curves, config.reduce_g_max));
    for (auto& c : check_connected_ordering(image, curves, config.g_max)) {
        out.push_back(std::move(c));
    }
    return out;
}

inline bool all_hard_checks_pass(const std::vector<CheckResult>& results) {
    return std::none_of(results.begin(), results.end(),
                        [](const CheckResult& r) { return r.status == CheckResult::Status::Fail; });
}

inline std::string format_report(const std::vector<CheckResult>& results) {
    std::size_t width = 5;
    for (const auto& r : results) {
        width = std::max(width, r.name.size());
    }
    std::ostringstream os;
    for (const auto& r : results) {
        os << r.name << std::string(width - r.name.size() + 2, ' ') << status_name(r.status) << "  " << r.detail
           << '\n';
    }
    return os.str();
}

} // namespace pixclust

#endif
