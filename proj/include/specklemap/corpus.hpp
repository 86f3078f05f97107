#pragma once

// Synthetic sequences: a base scene plus a simple camera trajectory, rendered
// frame by frame with per-frame seeds, and the corpus-level evaluation loop.

#include "specklemap/io.hpp"
#include "specklemap/metrics.hpp"
#include "specklemap/pipeline.hpp"
#include "specklemap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace specklemap {

/// Camera path relative to the base scene's pose. Frame k of N sits at
/// fraction t = k / (N - 1) along the advance.
struct Trajectory {
    double advance = 0.0;             // metres moved forward (+z) over the sequence
    double yaw_amplitude_deg = 0.0;
    int yaw_period = 50;              // frames
    double lateral_amplitude = 0.0;   // metres, along x
    int lateral_period = 100;         // frames

    bool operator==(const Trajectory&) const = default;
};

struct CorpusSpec {
    std::string name = "corpus";
    int frames = 1;
    double frame_interval = 0.1;  // seconds
    std::uint64_t seed = 0;
    SceneSpec scene;
    Trajectory trajectory;

    void validate() const {
        if (frames < 0) throw ValidationError("corpus: frames must be >= 0");
        if (!(frame_interval > 0.0)) throw ValidationError("corpus: frame_interval must be > 0");
        if (trajectory.yaw_period < 1 || trajectory.lateral_period < 1)
            throw ValidationError("corpus: trajectory periods must be >= 1");
        try {
            scene.validate();
        } catch (const ParameterError& e) {
            throw ValidationError(e.what());
        }
    }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline SceneSpec corpus_frame_scene(const CorpusSpec& c, int k) {
    SceneSpec s = c.scene;
    const double t = c.frames > 1 ? static_cast<double>(k) / (c.frames - 1) : 0.0;
    const Trajectory& tr = c.trajectory;
    s.pose.z += tr.advance * t;
    s.pose.yaw_deg += tr.yaw_amplitude_deg * std::sin(2.0 * std::numbers::pi * k / tr.yaw_period);
    s.pose.x += tr.lateral_amplitude * std::sin(2.0 * std::numbers::pi * k / tr.lateral_period);
    s.timestamp = k * c.frame_interval;
    s.seed = splitmix64(c.seed + static_cast<std::uint64_t>(k));
    return s;
}

inline RenderedScene render_corpus_frame(const CorpusSpec& c, const CameraIntrinsics& k, int index) {
    if (index < 0 || index >= c.frames) throw BoundsError("corpus frame index out of range");
    return render_scene(corpus_frame_scene(c, index), k);
}

inline json to_json(const CorpusSpec& c) {
    return {{"name", c.name},
            {"frames", c.frames},
            {"frame_interval", c.frame_interval},
            {"seed", c.seed},
            {"scene", to_json(c.scene)},
            {"trajectory",
             {{"advance", c.trajectory.advance},
              {"yaw_amplitude_deg", c.trajectory.yaw_amplitude_deg},
              {"yaw_period", c.trajectory.yaw_period},
              {"lateral_amplitude", c.trajectory.lateral_amplitude},
              {"lateral_period", c.trajectory.lateral_period}}}};
}

inline CorpusSpec corpus_from_json(const json& j) {
    CorpusSpec c;
    try {
        c.name = j.value("name", c.name);
        c.frames = j.value("frames", c.frames);
        c.frame_interval = j.value("frame_interval", c.frame_interval);
        c.seed = j.value("seed", c.seed);
        if (j.contains("scene")) c.scene = scene_from_json(j.at("scene"));
        if (j.contains("trajectory")) {
            const json& t = j.at("trajectory");
            c.trajectory.advance = t.value("advance", 0.0);
            c.trajectory.yaw_amplitude_deg = t.value("yaw_amplitude_deg", 0.0);
            c.trajectory.yaw_period = t.value("yaw_period", 50);
            c.trajectory.lateral_amplitude = t.value("lateral_amplitude", 0.0);
            c.trajectory.lateral_period = t.value("lateral_period", 100);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("corpus: ") + e.what());
    }
    c.validate();
    return c;
}

inline CorpusSpec load_corpus_spec(const fs::path& path) {
    return corpus_from_json(parse_json(read_file(path), path.string()));
}

namespace corpora {

/// Pane set in a wall opening of the same size, nothing behind it.
inline SceneSpec window_scene(double distance) {
    SceneSpec s;
    Pane pane;
    pane.distance = distance;
    s.panes.push_back(pane);
    Wall wall;
    wall.distance = distance;
    wall.openings.push_back(pane.extent);
    s.walls.push_back(wall);
    return s;
}

/// Approach from 3 m to 1 m facing the pane with a small yaw wobble.
inline CorpusSpec head_on_clear() {
    CorpusSpec c;
    c.name = "head_on_clear";
    c.frames = 200;
    c.frame_interval = 0.1;
    c.seed = 20240917;
    c.scene = window_scene(3.0);
    c.scene.noise = {0.015, 0.10};
    c.trajectory.advance = 2.0;
    c.trajectory.yaw_amplitude_deg = 2.0;
    c.trajectory.yaw_period = 50;
    return c;
}

/// Same window with boxes in front of the wall and a partial back wall seen
/// through the glass, swept sideways.
inline CorpusSpec cluttered() {
    CorpusSpec c = head_on_clear();
    c.name = "cluttered";
    c.seed = 20240918;
    // a back surface 1.2 m behind the glass, covering the left part of the opening
    Wall back;
    back.distance = 3.0 + 1.2;
    back.extent = {-1.5, -0.25, -1.0, 1.0};
    c.scene.walls.push_back(back);
    c.scene.clutter.push_back({{0.25, 0.45, -0.30, 0.05}, 0.8});
    c.scene.clutter.push_back({{-0.15, 0.05, 0.10, 0.40}, 2.5});
    c.trajectory.lateral_amplitude = 0.3;
    c.trajectory.lateral_period = 100;
    return c;
}

/// Short sequence used for the end-to-end determinism check.
inline CorpusSpec reference() {
    CorpusSpec c = head_on_clear();
    c.name = "reference";
    c.frames = 12;
    c.seed = 7;
    c.trajectory.advance = 0.3;
    return c;
}

}  // namespace corpora

/// Renders the corpus into `dir`: frame_NNNN.pgm + sidecar + frame_NNNN_gt.pgm
/// per frame and manifest.json. Frames are independent, so `jobs` threads
/// render them in parallel; output does not depend on `jobs`.
inline Manifest generate_corpus(const CorpusSpec& c, const CameraIntrinsics& k, const fs::path& dir, int jobs = 1) {
    c.validate();
    k.validate();
    fs::create_directories(dir);
    Manifest m;
    m.name = c.name;
    m.intrinsics = k;
    m.frames.resize(static_cast<std::size_t>(c.frames));

    auto work = [&](int index) {
        const SceneSpec scene = corpus_frame_scene(c, index);
        const RenderedScene r = render_scene(scene, k);
        char stem[32];
        std::snprintf(stem, sizeof stem, "frame_%04d", index);
        const std::string depth = std::string(stem) + ".pgm";
        const std::string gt = std::string(stem) + "_gt.pgm";
        FrameMetadata meta;
        meta.sonar = r.sonar;
        write_depth(dir / depth, r.frame, meta);
        write_mask(dir / gt, r.truth.glass_mask);
        ManifestEntry& e = m.frames[static_cast<std::size_t>(index)];
        e.depth = depth;
        e.ground_truth = gt;
        e.depth_hash = file_hash(dir / depth);
        e.ground_truth_hash = file_hash(dir / gt);
        e.seed = scene.seed;
        e.sonar_range = r.sonar.range;
        e.scene = to_json(scene);
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < c.frames; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int i = t; i < c.frames; i += jobs) work(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    write_manifest(dir / "manifest.json", m);
    return m;
}

struct CorpusScore {
    CorpusEvaluator evaluator;
    std::vector<FrameDiagnostics> diagnostics;
};

/// Runs the pipeline over the corpus in frame order with a fresh tracker and
/// scores synthesized pixels against the ground-truth glass mask.
inline CorpusScore evaluate_corpus(const PipelineConfig& cfg, const CorpusSpec& c, const CameraIntrinsics& k,
                                   bool keep_diagnostics = false) {
    Pipeline pipeline(cfg);
    CorpusScore out;
    for (int i = 0; i < c.frames; ++i) {
        const RenderedScene r = render_corpus_frame(c, k, i);
        FrameResult res = pipeline.process(r.frame, r.sonar);
        out.evaluator.add(pixel_confusion(res.fused.synthesized_mask(), r.truth.glass_mask));
        if (keep_diagnostics) out.diagnostics.push_back(std::move(res.diagnostics));
    }
    return out;
}

}  // namespace specklemap
