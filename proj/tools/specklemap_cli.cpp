// specklemap: corpus generation, batch detection, evaluation, benchmarking,
// rendering and gradient calibration from the command line.
//
// Exit codes: 0 success, 1 validation failure, 2 I/O, parse or usage error.

#include "specklemap/batch.hpp"
#include "specklemap/calibration.hpp"
#include "specklemap/render.hpp"
#include "specklemap/specklemap.hpp"

#include "CLI11.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace sm = specklemap;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("specklemap");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    spdlog::set_level(spdlog::level::info);
    if (const char* env = std::getenv("SPECKLEMAP_LOG")) {
        const std::string lvl = env;
        if (lvl == "error")
            spdlog::set_level(spdlog::level::err);
        else if (lvl == "info")
            spdlog::set_level(spdlog::level::info);
        else if (lvl == "debug")
            spdlog::set_level(spdlog::level::debug);
        else
            spdlog::warn("SPECKLEMAP_LOG='{}' not recognised (error, info, debug); using info", lvl);
    }
}

struct CommonOptions {
    std::string config;
    std::optional<int> preset;
    std::optional<std::string> mode;
    std::string out;
    std::optional<std::uint64_t> seed;
    int jobs = 1;
};

sm::PipelineConfig resolve_config(const CommonOptions& o) {
    sm::json j = sm::json::object();
    if (!o.config.empty()) j = sm::parse_json(sm::read_file(o.config), o.config);
    if (!j.is_object()) throw sm::ValidationError("config: expected a JSON object");
    if (o.preset) j["preset"] = *o.preset;
    if (o.mode) j["mode"] = *o.mode;
    return sm::config_from_json(j);
}

sm::CorpusSpec builtin_corpus(const std::string& name) {
    if (name == "head_on_clear") return sm::corpora::head_on_clear();
    if (name == "cluttered") return sm::corpora::cluttered();
    if (name == "reference") return sm::corpora::reference();
    throw sm::ValidationError("unknown corpus '" + name + "' (head_on_clear, cluttered, reference)");
}

void add_pipeline_flags(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config, "pipeline config JSON (preset + overrides)")->check(CLI::ExistingFile);
    cmd->add_option("--preset", o.preset, "preset id")->check(CLI::IsMember({1, 2, 3}));
    cmd->add_option("--mode", o.mode, "reprojection mode")->check(CLI::IsMember({"linear", "exact"}));
}

int cmd_gen(const CommonOptions& o, const std::string& scene, const std::string& corpus_name, int frames) {
    sm::CorpusSpec c = scene.empty() ? builtin_corpus(corpus_name) : sm::load_corpus_spec(scene);
    if (o.seed) c.seed = *o.seed;
    if (frames > 0) c.frames = frames;
    const sm::Manifest m = sm::generate_corpus(c, sm::default_intrinsics(), o.out, o.jobs);
    spdlog::info("wrote {} frames of '{}' to {}", m.frames.size(), c.name, o.out);
    return 0;
}

int cmd_detect(const CommonOptions& o, const std::string& manifest, bool timing) {
    const sm::PipelineConfig cfg = resolve_config(o);
    if (o.jobs > 1) spdlog::info("detect: tracker is stateful, frames run in manifest order (--jobs ignored)");
    spdlog::debug("config: {}", sm::to_json(cfg).dump());
    const sm::DetectSummary s = sm::detect_manifest(cfg, manifest, o.out, {timing});
    spdlog::info("processed {} frames, {} with synthesized glass ({} px total)", s.frames, s.frames_with_fill,
                 s.synthesized_pixels);
    return 0;
}

int cmd_eval(const std::string& manifest, const std::string& experiment, const std::string& preset,
             const std::string& out) {
    const sm::CorpusEvaluator ev = sm::evaluate_manifest(manifest);
    const std::vector<sm::ResultRow> rows{{experiment, preset, ev.precision(), ev.recall(), ev.miou(), ev.frames()}};
    std::ostringstream csv;
    sm::write_results_csv(csv, rows);
    if (out.empty())
        std::cout << csv.str();
    else
        sm::atomic_write(out, csv.str());
    spdlog::info("precision {:.4f} recall {:.4f} mIOU {:.4f} over {} frames", ev.precision(), ev.recall(), ev.miou(),
                 ev.frames());
    return 0;
}

int cmd_bench(const CommonOptions& o, int frames, const std::string& out) {
    const sm::PipelineConfig cfg = resolve_config(o);
    sm::CorpusSpec c = sm::corpora::head_on_clear();
    if (o.seed) c.seed = *o.seed;
    const sm::BenchReport r = sm::bench_pipeline(cfg, c, sm::default_intrinsics(), frames);
    std::ostringstream ss;
    ss << "frames       " << r.frames << " (640x480 synthetic, single thread)\n"
       << "mean         " << r.mean_ms << " ms\n"
       << "median       " << r.median_ms << " ms\n"
       << "p99          " << r.p99_ms << " ms\n"
       << "max          " << r.max_ms << " ms\n"
       << "rate         " << r.hz << " Hz\n"
       << "note         desktop proxy measured on this machine, not an embedded-target figure\n";
    std::cout << ss.str();
    if (!out.empty()) {
        const sm::json j{{"frames", r.frames}, {"mean_ms", r.mean_ms}, {"median_ms", r.median_ms},
                         {"p99_ms", r.p99_ms}, {"max_ms", r.max_ms},   {"hz", r.hz},
                         {"note", "desktop proxy, single thread"}};
        sm::atomic_write(out, sm::dump_json(j));
    }
    return 0;
}

int cmd_render(const std::string& input, const std::string& view, const std::string& out, double max_depth) {
    const sm::LoadedFrame f = sm::read_depth(input);
    sm::Grid<std::uint8_t> img;
    if (view == "raw" || view == "fused") {
        img = sm::depth_to_gray(f.frame.depth, max_depth);
    } else {
        sm::FusedDepthFrame fused(f.frame);
        if (!f.meta.synthesized_mask.empty()) {
            const sm::Mask m = sm::read_mask(sm::fs::path(input).parent_path() / f.meta.synthesized_mask);
            if (m.width() != f.frame.width() || m.height() != f.frame.height())
                throw sm::StructuralError("synthesized mask size does not match the depth frame");
            for (std::size_t i = 0; i < m.size(); ++i)
                if (m.data()[i]) fused.provenance.data()[i] = static_cast<std::uint8_t>(sm::Provenance::synthesized);
        }
        img = sm::overlay_to_gray(fused, max_depth);
    }
    sm::write_gray_png(out, img);
    spdlog::info("wrote {}", out);
    return 0;
}

int cmd_calibrate(double tilt, double distance, const std::string& out) {
    const sm::CameraIntrinsics k = sm::default_intrinsics();
    const sm::AlphaCalibration c = sm::calibrate_alpha(k, tilt, distance);
    std::cout << "alpha          " << c.alpha << "\n"
              << "max |error|    " << c.max_abs_error << " m\n"
              << "rms error      " << c.rms_error << " m\n"
              << "pixels         " << c.pixels << "\n";
    if (!out.empty()) {
        const sm::json j{{"alpha", c.alpha},
                         {"max_abs_error", c.max_abs_error},
                         {"rms_error", c.rms_error},
                         {"pixels", c.pixels},
                         {"tilt_deg", tilt},
                         {"distance", distance}};
        sm::atomic_write(out, sm::dump_json(j));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Glass detection and depth fill for time-of-flight depth frames"};
    app.require_subcommand(1);

    CommonOptions o;

    auto* gen = app.add_subcommand("gen", "render a synthetic corpus");
    std::string scene, corpus_name = "head_on_clear";
    int gen_frames = 0;
    gen->add_option("--scene", scene, "corpus JSON (scene + trajectory)")->check(CLI::ExistingFile);
    gen->add_option("--corpus", corpus_name, "built-in corpus: head_on_clear, cluttered, reference");
    gen->add_option("--frames", gen_frames, "override the frame count");
    gen->add_option("--out", o.out, "output directory")->required();
    gen->add_option("--seed", o.seed, "override the corpus seed");
    gen->add_option("--jobs", o.jobs, "render threads")->check(CLI::PositiveNumber);

    auto* detect = app.add_subcommand("detect", "run the pipeline over a manifest");
    std::string manifest;
    bool timing = false;
    detect->add_option("--manifest", manifest, "input manifest.json")->required()->check(CLI::ExistingFile);
    add_pipeline_flags(detect, o);
    detect->add_option("--out", o.out, "output directory")->required();
    detect->add_option("--jobs", o.jobs, "accepted for symmetry; frames run in order")->check(CLI::PositiveNumber);
    detect->add_flag("--timing", timing, "include stage timings in diagnostics.jsonl");

    auto* eval = app.add_subcommand("eval", "score prediction masks against ground truth");
    std::string experiment = "run", preset_label = "-", csv_out;
    eval->add_option("--manifest", manifest, "manifest with prediction and ground_truth entries")
        ->required()
        ->check(CLI::ExistingFile);
    eval->add_option("--experiment", experiment, "experiment column value");
    eval->add_option("--label", preset_label, "preset column value");
    eval->add_option("--out", csv_out, "CSV path (stdout when omitted)");

    auto* bench = app.add_subcommand("bench", "time the pipeline on synthetic frames");
    int bench_frames = 100;
    std::string bench_out;
    add_pipeline_flags(bench, o);
    bench->add_option("--frames", bench_frames, "frame count")->check(CLI::PositiveNumber);
    bench->add_option("--seed", o.seed, "corpus seed");
    bench->add_option("--out", bench_out, "also write the report as JSON");

    auto* render = app.add_subcommand("render", "grayscale PNG of a depth frame");
    std::string input, view = "raw", png_out;
    double max_depth = sm::kMaxDepthM;
    render->add_option("--input", input, "depth PGM (sidecar next to it)")->required()->check(CLI::ExistingFile);
    render->add_option("--view", view, "raw, fused or overlay")->check(CLI::IsMember({"raw", "fused", "overlay"}));
    render->add_option("--max-depth", max_depth, "depth mapped to the darkest gray")->check(CLI::PositiveNumber);
    render->add_option("--out", png_out, "output PNG")->required();

    auto* calib = app.add_subcommand("calibrate-alpha", "fit the linear gradient gain against the exact plane");
    double tilt = 10.0, distance = 2.0;
    std::string calib_out;
    calib->add_option("--tilt", tilt, "pane yaw in degrees");
    calib->add_option("--distance", distance, "pane distance in metres")->check(CLI::PositiveNumber);
    calib->add_option("--out", calib_out, "also write the fit as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitIo;
    }

    try {
        if (*gen) return cmd_gen(o, scene, corpus_name, gen_frames);
        if (*detect) return cmd_detect(o, manifest, timing);
        if (*eval) return cmd_eval(manifest, experiment, preset_label, csv_out);
        if (*bench) return cmd_bench(o, bench_frames, bench_out);
        if (*render) return cmd_render(input, view, png_out, max_depth);
        if (*calib) return cmd_calibrate(tilt, distance, calib_out);
    } catch (const sm::ValidationError& e) {
        spdlog::error("{}", e.what());
        return kExitValidation;
    } catch (const sm::ParameterError& e) {
        spdlog::error("{}", e.what());
        return kExitValidation;
    } catch (const sm::ContractError& e) {
        spdlog::error("{}", e.what());
        return kExitValidation;
    } catch (const sm::Error& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return kExitIo;
    }
    return kExitIo;
}
