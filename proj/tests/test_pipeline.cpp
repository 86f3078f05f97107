#include "specklemap/corpus.hpp"
#include "specklemap/io.hpp"
#include "specklemap/pipeline.hpp"

#include <gtest/gtest.h>

using namespace specklemap;

namespace {

SonarReading sonar_at(double r) {
    SonarReading s;
    s.range = r;
    return s;
}

PipelineConfig quick_confirm(int preset) {
    PipelineConfig c = PipelineConfig::from_preset(preset);
    c.tracker.required_count = 1;
    return c;
}

}  // namespace

TEST(Pipeline, ValidWallPassesThroughUntouched) {
    DepthFrame f(default_intrinsics(), 0.0);
    for (double& d : f.depth.data()) d = 2.5;
    Pipeline p(PipelineConfig::from_preset(3));
    const FrameResult r = p.process(f, sonar_at(2.5));
    EXPECT_EQ(r.fused.frame.depth, f.depth);
    EXPECT_EQ(r.fused.synthesized_count(), 0);
    EXPECT_TRUE(r.diagnostics.candidates.empty());
    EXPECT_TRUE(r.diagnostics.confirmed.empty());
}

TEST(Pipeline, HeadOnPaneFilledOnFirstFrame) {
    const CameraIntrinsics k = default_intrinsics();
    const RenderedScene scene = render_scene(corpora::window_scene(2.0), k);
    Pipeline p(quick_confirm(3));
    const FrameResult r = p.process(scene.frame, scene.sonar);
    ASSERT_EQ(r.diagnostics.confirmed.size(), 1u);
    const Scores s = scores(pixel_confusion(r.fused.synthesized_mask(), scene.truth.glass_mask));
    EXPECT_GE(s.precision, 0.95);
    EXPECT_GE(s.recall, 0.95);
    for (int v = 0; v < k.height; ++v)
        for (int u = 0; u < k.width; ++u)
            if (r.fused.synthesized(u, v)) { EXPECT_NEAR(r.fused.frame.depth(u, v), 2.0, 1e-9); }
}

TEST(Pipeline, ExactModeMatchesTiltedPaneDepth) {
    const CameraIntrinsics k = default_intrinsics();
    SceneSpec s = corpora::window_scene(2.0);
    s.panes[0].yaw_deg = 8.0;
    s.walls[0].yaw_deg = 8.0;
    const RenderedScene scene = render_scene(s, k);
    PipelineConfig cfg = quick_confirm(3);
    cfg.mode = FillMode::exact;
    const FrameResult r = Pipeline(cfg).process(scene.frame, scene.sonar);
    ASSERT_GT(r.fused.synthesized_count(), 0);
    double worst = 0.0;
    for (int v = 0; v < k.height; ++v)
        for (int u = 0; u < k.width; ++u)
            if (r.fused.synthesized(u, v) && scene.truth.glass_mask(u, v))
                worst = std::max(worst, std::abs(r.fused.frame.depth(u, v) - scene.truth.true_depth(u, v)));
    // the plane normal comes from the rounded speckle pixel, so allow a few millimetres
    EXPECT_LT(worst, 0.02);
}

TEST(Pipeline, NoConfirmationBeforeRequiredCount) {
    const RenderedScene scene = render_scene(corpora::window_scene(2.0), default_intrinsics());
    Pipeline p(PipelineConfig::from_preset(3));
    for (int i = 0; i < 3; ++i) {
        DepthFrame f = scene.frame;
        f.timestamp = 0.1 * i;
        const FrameResult r = p.process(f, scene.sonar);
        EXPECT_EQ(r.fused.synthesized_count() > 0, i == 2) << i;
    }
}

TEST(Pipeline, DeterministicAcrossInstances) {
    const CameraIntrinsics k = default_intrinsics();
    CorpusSpec c = corpora::cluttered();
    c.frames = 8;
    Pipeline a(PipelineConfig::from_preset(3)), b(PipelineConfig::from_preset(3));
    for (int i = 0; i < c.frames; ++i) {
        const RenderedScene s = render_corpus_frame(c, k, i);
        const FrameResult ra = a.process(s.frame, s.sonar), rb = b.process(s.frame, s.sonar);
        EXPECT_EQ(ra.fused.frame.depth, rb.fused.frame.depth);
        EXPECT_EQ(ra.fused.provenance, rb.fused.provenance);
        EXPECT_EQ(to_json(ra.diagnostics, false).dump(), to_json(rb.diagnostics, false).dump());
    }
}

TEST(Pipeline, TimingInvariants) {
    const RenderedScene scene = render_scene(corpora::window_scene(2.0), default_intrinsics());
    const FrameResult r = Pipeline(quick_confirm(3)).process(scene.frame, scene.sonar);
    const StageTiming& t = r.diagnostics.timing;
    double mx = 0.0;
    for (double x : {t.gate, t.kernels, t.peaks, t.validation, t.tracking, t.segmentation, t.reprojection}) {
        EXPECT_GE(x, 0.0);
        mx = std::max(mx, x);
    }
    EXPECT_GE(t.total, mx);
}

TEST(Pipeline, MeasuredPixelsNeverModified) {
    const CameraIntrinsics k = default_intrinsics();
    CorpusSpec c = corpora::cluttered();
    c.frames = 5;
    Pipeline p(quick_confirm(3));
    for (int i = 0; i < c.frames; ++i) {
        const RenderedScene s = render_corpus_frame(c, k, i);
        const FrameResult r = p.process(s.frame, s.sonar);
        for (int v = 0; v < k.height; ++v)
            for (int u = 0; u < k.width; ++u) {
                if (!r.fused.synthesized(u, v)) {
                    EXPECT_EQ(r.fused.frame.depth(u, v), s.frame.depth(u, v));
                } else {
                    // only pixels that were empty after the sonar gate are filled
                    EXPECT_TRUE(!s.frame.valid(u, v) || s.frame.depth(u, v) > s.sonar.range + 0.2);
                }
            }
    }
}

TEST(Pipeline, SonarImprovesRecallOnClutteredSequence) {
    const CameraIntrinsics k = default_intrinsics();
    CorpusSpec c = corpora::cluttered();
    c.frames = 30;
    const CorpusScore p1 = evaluate_corpus(PipelineConfig::from_preset(1), c, k);
    const CorpusScore p3 = evaluate_corpus(PipelineConfig::from_preset(3), c, k);
    EXPECT_GT(p3.evaluator.recall(), p1.evaluator.recall());
}

TEST(Pipeline, NonMonotoneTimestampsRejected) {
    DepthFrame f(default_intrinsics(), 1.0);
    Pipeline p(PipelineConfig::from_preset(3));
    p.process(f, sonar_at(2.0));
    EXPECT_THROW(p.process(f, sonar_at(2.0)), ContractError);
}

TEST(Pipeline, MismatchedFrameIsStructuralError) {
    DepthFrame f(default_intrinsics(), 0.0);
    f.depth = Grid<double>(10, 10, 0.0);
    EXPECT_THROW(Pipeline(PipelineConfig::from_preset(3)).process(f, sonar_at(2.0)), StructuralError);
}

TEST(PipelineConfig, PresetsDiffer) {
    const auto p1 = PipelineConfig::from_preset(1), p2 = PipelineConfig::from_preset(2),
               p3 = PipelineConfig::from_preset(3);
    EXPECT_FALSE(p1.sonar_enabled);
    EXPECT_TRUE(p2.sonar_enabled);
    EXPECT_EQ(p1.empty_ratio_max, p2.empty_ratio_max);
    EXPECT_EQ(p3.empty_ratio_max, 0.3);
    EXPECT_EQ(p3.circularity_threshold, 0.5);
    EXPECT_THROW(PipelineConfig::from_preset(4), ParameterError);
}

TEST(PipelineConfig, JsonOverridesAndRejections) {
    const PipelineConfig c = config_from_json(json::parse(R"({"preset": 2, "required_count": 1, "mode": "exact",
                                                              "exclusion": [500, 380, 140, 100]})"));
    EXPECT_EQ(c.preset, 2);
    EXPECT_TRUE(c.sonar_enabled);
    EXPECT_EQ(c.tracker.required_count, 1);
    EXPECT_EQ(c.mode, FillMode::exact);
    ASSERT_TRUE(c.exclusion.has_value());
    EXPECT_EQ(*c.exclusion, (Rect{500, 380, 140, 100}));

    const PipelineConfig back = config_from_json(to_json(c));
    EXPECT_EQ(to_json(back), to_json(c));

    EXPECT_THROW(config_from_json(json::parse(R"({"bogus": 1})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"r_b": "big"})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"iou_max": 1.5})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse(R"({"mode": "cubic"})")), ValidationError);
    EXPECT_THROW(config_from_json(json::parse("[1, 2]")), ValidationError);
}
