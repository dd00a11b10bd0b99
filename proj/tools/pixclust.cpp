// pixclust: command-line driver for the piecewise-constant approximation pipelines.
//
//   pixclust gen --kind bimodal --size 64x64 -o in.pgm
//   pixclust curve in.pgm --pipeline optimal --g 1..64 --out results
//   pixclust compare in.pgm --g 1..1000 --out results
//   pixclust render in.pgm --pipeline split --g 4 -o out.pgm
//   pixclust verify in.pgm
//
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration
// error, 3 I/O or format error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pixclust/imageio.hpp"
#include "pixclust/pipelines.hpp"
#include "pixclust/synth.hpp"
#include "pixclust/verify.hpp"

namespace fs = std::filesystem;
using namespace pixclust;

namespace {

enum ExitCode { Ok = 0, VerifyFailed = 1, UsageError = 2, IoError = 3 };

/// Configuration problem detected before or during a run.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GRange {
    std::size_t lo = 1;
    std::size_t hi = 1;
};

std::size_t parse_count(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos || s.size() > 12) {
        throw ConfigError(std::string("invalid ") + what + " '" + s + "'");
    }
    return std::stoull(s);
}

// "a..b" inclusive, or a single g.
GRange parse_g_range(const std::string& text) {
    GRange r;
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        r.lo = r.hi = parse_count(text, "g");
    } else {
        r.lo = parse_count(text.substr(0, dots), "g range start");
        r.hi = parse_count(text.substr(dots + 2), "g range end");
    }
    if (r.lo < 1 || r.hi < r.lo) {
        throw ConfigError("g range '" + text + "' must satisfy 1 <= a <= b");
    }
    return r;
}

StoppingCondition parse_stop(const std::string& text) {
    if (text == "one-segment") {
        return StoppingCondition::one_segment();
    }
    if (text == "unique-means") {
        return StoppingCondition::unique_means();
    }
    if (text.rfind("target=", 0) == 0) {
        return StoppingCondition::target_count(parse_count(text.substr(7), "target segment count"));
    }
    throw ConfigError("unknown stopping condition '" + text + "' (one-segment, unique-means, target=M)");
}

std::pair<std::uint32_t, std::uint32_t> parse_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw ConfigError("size '" + text + "' must look like WxH");
    }
    const std::size_t w = parse_count(text.substr(0, x), "width");
    const std::size_t h = parse_count(text.substr(x + 1), "height");
    if (w == 0 || h == 0 || w > 65535 || h > 65535) {
        throw ConfigError("size '" + text + "' out of range");
    }
    return {static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h)};
}

Pipeline pipeline_or_config_error(const std::string& name) {
    try {
        return parse_pipeline(name);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

// Tags are used as file name fragments too; '/' is not allowed there.
std::string file_tag(std::string tag) {
    for (char& c : tag) {
        if (c == '/') {
            c = '-';
        }
    }
    return tag;
}

Image load_input(const std::string& path) {
    if (!fs::is_regular_file(path)) {
        throw PgmError(PgmError::Kind::Io, "input '" + path + "' is not a readable file");
    }
    return load_pgm(path);
}

void prepare_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) {
        throw PgmError(PgmError::Kind::Io, "output directory '" + dir.string() + "' cannot be created");
    }
}

void check_output_file(const fs::path& path) {
    const fs::path parent = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    if (!fs::is_directory(parent)) {
        throw PgmError(PgmError::Kind::Io, "output directory '" + parent.string() + "' does not exist");
    }
}

void warn(const std::string& context, const ApproximationSequence& seq) {
    if (seq.warning) {
        std::cerr << "warning: " << context << ": " << *seq.warning << '\n';
    }
}

struct RunSpec {
    std::string tag;
    Pipeline pipeline;
    PipelineOptions options;
};

std::vector<CurveRecord> run_curve(const RunSpec& spec, const Image& image, GRange range) {
    ApproximationSequence seq = run_pipeline(spec.pipeline, image, range.hi, spec.options);
    warn(spec.tag, seq);
    return tag_records(spec.tag, restrict_from(std::move(seq), range.lo));
}

void render_one(const RunSpec& spec, const Image& image, std::size_t g, const fs::path& out) {
    save_pgm(out, render_partition(pipeline_partition(spec.pipeline, image, g, spec.options), image));
}

// Renders at every requested g the curve actually reached.
void render_recorded(const RunSpec& spec, const Image& image, const std::vector<CurveRecord>& records,
                     const std::vector<std::size_t>& gs, const fs::path& dir, const std::string& stem) {
    for (const std::size_t g : gs) {
        const bool reached = std::any_of(records.begin(), records.end(),
                                         [&](const CurveRecord& r) { return r.record.g == g; });
        if (!reached) {
            std::cerr << "warning: " << spec.tag << ": no partition at g = " << g << ", not rendered\n";
            continue;
        }
        render_one(spec, image, g, dir / (stem + "_" + file_tag(spec.tag) + "_g" + std::to_string(g) + ".pgm"));
    }
}

std::vector<std::size_t> parse_g_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const std::size_t g = parse_count(item, "g");
        if (g < 1) {
            throw ConfigError("g must be at least 1");
        }
        out.push_back(g);
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piecewise-constant grayscale approximation by pixel clustering"};
    app.require_subcommand(1);

    std::string input;
    std::string pipeline = "split";
    std::string g_text = "1..64";
    std::string stop_text = "one-segment";
    std::string out_dir = ".";
    std::string out_file;
    std::string render_at;
    bool render = false;
    bool global_reduce = false;

    auto add_reduce_flags = [&](CLI::App* cmd) {
        cmd->add_option("--stop", stop_text, "Segment reduction stopping condition: one-segment, unique-means, target=M");
        cmd->add_flag("--global-reduce", global_reduce, "Reduce each quasioptimal partition afterwards");
    };

    auto* curve = app.add_subcommand("curve", "E-vs-g curve of one pipeline as CSV");
    curve->add_option("input", input, "Input PGM")->required();
    curve->add_option("--pipeline", pipeline, "split, merge-all, merge-adjacent, optimal, kmeans, correct, reduce, ms-merge");
    curve->add_option("--g", g_text, "g or inclusive range a..b");
    curve->add_option("--out", out_dir, "Output directory");
    curve->add_flag("--render", render, "Also write the approximation image at every g of the range");
    curve->add_option("--render-at", render_at, "Comma-separated g values to render (implies --render)");
    add_reduce_flags(curve);

    auto* compare = app.add_subcommand("compare", "Curves of every pipeline in one CSV");
    compare->add_option("input", input, "Input PGM")->required();
    compare->add_option("--g", g_text, "g or inclusive range a..b");
    compare->add_option("--out", out_dir, "Output directory");
    compare->add_option("--render-at", render_at, "Comma-separated g values to render for every pipeline");

    auto* render_cmd = app.add_subcommand("render", "Approximation image of one pipeline at one g");
    render_cmd->add_option("input", input, "Input PGM")->required();
    render_cmd->add_option("--pipeline", pipeline, "Pipeline name");
    render_cmd->add_option("--g", g_text, "Number of clusters (segments for ms-merge)")->required();
    render_cmd->add_option("-o,--output", out_file, "Output PGM")->required();
    add_reduce_flags(render_cmd);

    std::size_t g_max = 256;
    std::size_t reduce_g_max = 32;
    std::uint64_t seed = 1;
    auto* verify = app.add_subcommand("verify", "Run the invariant checks on an image");
    verify->add_option("input", input, "Input PGM")->required();
    verify->add_option("--g-max", g_max, "Largest g of the curve checks")->check(CLI::PositiveNumber);
    verify->add_option("--reduce-g-max", reduce_g_max, "Largest g of the segment reduction check")
        ->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Seed of the randomized checks");

    std::string kind = "bimodal";
    std::string size = "64x64";
    std::uint32_t levels = 256;
    auto* gen = app.add_subcommand("gen", "Write a seeded synthetic test image");
    gen->add_option("--kind", kind, "bimodal, multiband or checker");
    gen->add_option("--size", size, "WxH");
    gen->add_option("--levels", levels, "Gray level count")->check(CLI::Range(2u, 65536u));
    gen->add_option("--seed", seed, "Noise seed");
    gen->add_option("-o,--output", out_file, "Output PGM")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : UsageError;
    }

    try {
        if (gen->parsed()) {
            const auto [w, h] = parse_size(size);
            check_output_file(out_file);
            const synth::Kind k = [&] {
                try {
                    return synth::parse_kind(kind);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }();
            save_pgm(out_file, synth::generate(k, w, h, levels, seed));
            return Ok;
        }

        if (verify->parsed()) {
            const Image image = load_input(input);
            VerifyConfig config;
            config.g_max = g_max;
            config.reduce_g_max = reduce_g_max;
            config.seed = seed;
            const auto results = run_verification(image, config);
            std::cout << format_report(results);
            return all_hard_checks_pass(results) ? Ok : VerifyFailed;
        }

        PipelineOptions options;
        options.stop = parse_stop(stop_text);
        options.global_reduce = global_reduce;
        const GRange range = parse_g_range(g_text);

        if (render_cmd->parsed()) {
            if (range.lo != range.hi) {
                throw ConfigError("render takes a single g");
            }
            const Pipeline p = pipeline_or_config_error(pipeline);
            const Image image = load_input(input);
            check_output_file(out_file);
            render_one({pipeline_name(p), p, options}, image, range.lo, out_file);
            return Ok;
        }

        const std::vector<std::size_t> render_gs = render_at.empty() ? std::vector<std::size_t>{}
                                                                     : parse_g_list(render_at);
        const fs::path dir(out_dir);
        const std::string stem = fs::path(input).stem().string();

        if (curve->parsed()) {
            const Pipeline p = pipeline_or_config_error(pipeline);
            std::string tag = pipeline_name(p);
            if (p == Pipeline::Reduce) {
                tag += "/" + options.stop.name();
            }
            const RunSpec spec{tag, p, options};
            const Image image = load_input(input);
            prepare_output_dir(dir);
            const auto records = run_curve(spec, image, range);
            write_file(dir / (stem + "_" + pipeline_name(p) + ".csv"), write_curve_csv(records));
            std::vector<std::size_t> gs = render_gs;
            if (render && gs.empty()) {
                for (const auto& r : records) {
                    gs.push_back(r.record.g);
                }
            }
            const RunSpec file_spec{pipeline_name(p), p, options};
            render_recorded(file_spec, image, records, gs, dir, stem);
            return Ok;
        }

        if (compare->parsed()) {
            const Image image = load_input(input);
            prepare_output_dir(dir);
            PipelineOptions unique = options;
            unique.stop = StoppingCondition::unique_means();
            const std::vector<RunSpec> specs = {
                {"optimal", Pipeline::Optimal, options},
                {"split", Pipeline::Split, options},
                {"merge-all", Pipeline::MergeAll, options},
                {"merge-adjacent", Pipeline::MergeAdjacent, options},
                {"reduce/one-segment", Pipeline::Reduce, options},
                {"reduce/unique-means", Pipeline::Reduce, unique},
                {"ms-merge", Pipeline::ConnectedMerge, options},
            };
            std::vector<CurveRecord> all;
            for (const auto& spec : specs) {
                const auto records = run_curve(spec, image, range);
                all.insert(all.end(), records.begin(), records.end());
                render_recorded(spec, image, records, render_gs, dir, stem);
            }
            write_file(dir / (stem + "_compare.csv"), write_curve_csv(all));
            return Ok;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return UsageError;
    } catch (const PgmError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return IoError;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << '\n';
        return UsageError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return UsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return IoError;
    }
    return UsageError;
}
