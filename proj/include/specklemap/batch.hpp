#pragma once

// Manifest-level operations behind the command line tool: run the pipeline
// over a stored corpus, score predictions, and time the pipeline.

#include "specklemap/corpus.hpp"
#include "specklemap/io.hpp"
#include "specklemap/metrics.hpp"
#include "specklemap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace specklemap {

struct DetectOptions {
    bool include_timing = false;  // timings make diagnostics run-dependent
};

struct DetectSummary {
    int frames = 0;
    long long synthesized_pixels = 0;
    int frames_with_fill = 0;
    Manifest output;
};

/// Frames are processed in manifest order: the tracker needs them sequential.
/// Writes fused_NNNN.pgm (+ sidecar), fused_NNNN_synth.pgm, diagnostics.jsonl,
/// config.json and manifest.json into `out_dir`.
inline DetectSummary detect_manifest(const PipelineConfig& cfg, const fs::path& manifest_path, const fs::path& out_dir,
                                     const DetectOptions& opts = {}) {
    const Manifest in = read_manifest(manifest_path);
    const fs::path in_dir = manifest_path.parent_path();
    fs::create_directories(out_dir);

    Pipeline pipeline(cfg);
    DetectSummary summary;
    summary.output.name = in.name;
    summary.output.intrinsics = in.intrinsics;
    std::string diagnostics;

    for (std::size_t i = 0; i < in.frames.size(); ++i) {
        const ManifestEntry& e = in.frames[i];
        const LoadedFrame loaded = read_depth(in_dir / e.depth);
        if (!(loaded.meta.intrinsics == in.intrinsics))
            throw StructuralError(e.depth + ": intrinsics differ from the manifest");
        SonarReading sonar;
        sonar.timestamp = loaded.frame.timestamp;
        if (loaded.meta.sonar) {
            sonar = *loaded.meta.sonar;
        } else {
            // no reading: report max range so the gate removes nothing in range
            sonar.range = sonar.max_range;
        }

        const FrameResult r = pipeline.process(loaded.frame, sonar);

        char stem[32];
        std::snprintf(stem, sizeof stem, "fused_%04zu", i);
        const std::string depth_name = std::string(stem) + ".pgm";
        const std::string synth_name = std::string(stem) + "_synth.pgm";
        FrameMetadata meta;
        meta.sonar = loaded.meta.sonar;
        meta.provenance = "fused";
        meta.synthesized_pixels = r.fused.synthesized_count();
        meta.synthesized_mask = synth_name;
        write_depth(out_dir / depth_name, r.fused.frame, meta);
        write_mask(out_dir / synth_name, r.fused.synthesized_mask());
        diagnostics += to_json(r.diagnostics, opts.include_timing).dump() + "\n";

        ManifestEntry o;
        o.depth = depth_name;
        o.depth_hash = file_hash(out_dir / depth_name);
        o.prediction = synth_name;
        o.prediction_hash = file_hash(out_dir / synth_name);
        if (!e.ground_truth.empty()) {
            const fs::path gt = fs::absolute(in_dir / e.ground_truth);
            o.ground_truth = fs::relative(gt, fs::absolute(out_dir)).generic_string();
            o.ground_truth_hash = e.ground_truth_hash;
        }
        summary.output.frames.push_back(o);

        ++summary.frames;
        summary.synthesized_pixels += meta.synthesized_pixels;
        if (meta.synthesized_pixels > 0) ++summary.frames_with_fill;
    }
    atomic_write(out_dir / "diagnostics.jsonl", diagnostics);
    atomic_write(out_dir / "config.json", dump_json(to_json(cfg)));
    write_manifest(out_dir / "manifest.json", summary.output);
    return summary;
}

/// Scores each entry's prediction mask against its ground truth. Entries
/// without a prediction count as predicting no glass.
inline CorpusEvaluator evaluate_manifest(const fs::path& manifest_path) {
    const Manifest m = read_manifest(manifest_path);
    const fs::path dir = manifest_path.parent_path();
    CorpusEvaluator ev;
    for (const ManifestEntry& e : m.frames) {
        if (e.ground_truth.empty()) throw ValidationError(e.depth + ": no ground truth in manifest");
        const Mask gt = read_mask(dir / e.ground_truth);
        if (gt.width() != m.intrinsics.width || gt.height() != m.intrinsics.height)
            throw StructuralError(e.ground_truth + ": mask size does not match the manifest intrinsics");
        const Mask pred = e.prediction.empty() ? Mask(gt.width(), gt.height(), 0) : read_mask(dir / e.prediction);
        ev.add(pixel_confusion(pred, gt));
    }
    return ev;
}

struct BenchReport {
    int frames = 0;
    double mean_ms = 0.0;
    double median_ms = 0.0;
    double p99_ms = 0.0;
    double max_ms = 0.0;
    double hz = 0.0;  // 1000 / mean
};

/// Nearest-rank percentile of an already sorted sample.
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
    return sorted[std::min(sorted.size() - 1, rank > 0 ? rank - 1 : 0)];
}

inline BenchReport summarize_latencies(std::vector<double> ms) {
    BenchReport r;
    r.frames = static_cast<int>(ms.size());
    if (ms.empty()) return r;
    std::sort(ms.begin(), ms.end());
    double sum = 0.0;
    for (double x : ms) sum += x;
    r.mean_ms = sum / static_cast<double>(ms.size());
    const std::size_t n = ms.size();
    r.median_ms = n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
    r.p99_ms = percentile_sorted(ms, 99.0);
    r.max_ms = ms.back();
    r.hz = r.mean_ms > 0.0 ? 1000.0 / r.mean_ms : 0.0;
    return r;
}

/// Renders `frames` frames of the corpus up front, then times process_frame
/// on each, single-threaded, with one pipeline carried across the sequence.
inline BenchReport bench_pipeline(const PipelineConfig& cfg, CorpusSpec corpus, const CameraIntrinsics& k, int frames) {
    if (frames < 1) throw ValidationError("bench: frames must be >= 1");
    corpus.frames = std::max(corpus.frames, frames);
    std::vector<RenderedScene> scenes;
    scenes.reserve(static_cast<std::size_t>(frames));
    for (int i = 0; i < frames; ++i) scenes.push_back(render_corpus_frame(corpus, k, i));

    Pipeline pipeline(cfg);
    std::vector<double> ms;
    ms.reserve(scenes.size());
    for (const RenderedScene& s : scenes) {
        const auto t0 = std::chrono::steady_clock::now();
        const FrameResult r = pipeline.process(s.frame, s.sonar);
        const auto t1 = std::chrono::steady_clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        (void)r;
    }
    return summarize_latencies(std::move(ms));
}

}  // namespace specklemap
