// Renders a window seen head-on, feeds it to a pipeline that confirms on the
// first detection, and prints how much of the glass got filled.

#include "specklemap/specklemap.hpp"

#include <cstdio>

using namespace specklemap;

int main() {
    const CameraIntrinsics k = default_intrinsics();
    SceneSpec scene = corpora::window_scene(2.0);
    scene.noise = {0.015, 0.1};
    scene.seed = 1;
    const RenderedScene r = render_scene(scene, k);

    PipelineConfig cfg = PipelineConfig::from_preset(3);
    cfg.tracker.required_count = 1;
    Pipeline pipeline(cfg);
    const FrameResult out = pipeline.process(r.frame, r.sonar);

    const Scores s = scores(pixel_confusion(out.fused.synthesized_mask(), r.truth.glass_mask));
    std::printf("candidates %zu, confirmed %zu, synthesized %lld px\n", out.diagnostics.candidates.size(),
                out.diagnostics.confirmed.size(), out.fused.synthesized_count());
    std::printf("precision %.3f  recall %.3f  IoU %.3f\n", s.precision, s.recall, s.iou);

    const int u = static_cast<int>(k.cx), v = static_cast<int>(k.cy) + 60;
    std::printf("depth at (%d, %d): raw %.3f m, fused %.3f m, truth %.3f m\n", u, v, r.frame.depth(u, v),
                out.fused.frame.depth(u, v), r.truth.true_depth(u, v));
    return 0;
}
