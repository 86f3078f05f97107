#pragma once

// Fits the horizontal-gradient gain of linear_gradient_fill against the exact
// ray/plane fill on a noise-free synthetic tilted pane.

#include "specklemap/reprojection.hpp"
#include "specklemap/segmentation.hpp"
#include "specklemap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace specklemap {

struct TiltedPaneSetup {
    ConfirmedSpeckle speckle;  // at the rendered perpendicular-reflection pixel
    Region pane;               // every ground-truth glass pixel
    GlassPlane true_plane;
    RenderedScene scene;
};

/// Head-on camera, one pane of the given yaw tilt and distance, no noise.
inline SceneSpec tilted_pane_scene(double tilt_deg, double distance, const PlaneExtent& extent = {-0.6, 0.6, -0.45, 0.45}) {
    SceneSpec spec;
    Pane pane;
    pane.distance = distance;
    pane.yaw_deg = tilt_deg;
    pane.extent = extent;
    spec.panes.push_back(pane);
    return spec;
}

inline TiltedPaneSetup make_tilted_pane(const SceneSpec& spec, const CameraIntrinsics& k) {
    TiltedPaneSetup s;
    s.scene = render_scene(spec, k);
    if (s.scene.truth.speckle_pixels.empty() || !s.scene.truth.speckle_pixels.front())
        throw ValidationError("tilted pane: perpendicular reflection is not visible");
    const auto [su, sv] = *s.scene.truth.speckle_pixels.front();
    s.speckle.u = su;
    s.speckle.v = sv;
    s.speckle.depth_m = s.scene.frame.depth(su, sv);
    s.true_plane = s.scene.truth.true_planes.front();

    const Mask& gm = s.scene.truth.glass_mask;
    int x0 = k.width, y0 = k.height, x1 = -1, y1 = -1;
    for (int v = 0; v < k.height; ++v)
        for (int u = 0; u < k.width; ++u)
            if (gm(u, v)) {
                x0 = std::min(x0, u);
                x1 = std::max(x1, u);
                y0 = std::min(y0, v);
                y1 = std::max(y1, v);
            }
    s.pane.bbox = Rect::from_corners(x0, y0, x1 + 1, y1 + 1);
    s.pane.mask = Mask(s.pane.bbox.width, s.pane.bbox.height, 0);
    for (int v = y0; v <= y1; ++v)
        for (int u = x0; u <= x1; ++u)
            if (gm(u, v)) {
                s.pane.mask(u - x0, v - y0) = 1;
                ++s.pane.area;
            }
    return s;
}

struct AlphaCalibration {
    double alpha = 0.0;
    double max_abs_error = 0.0;   // linear vs exact fill over the pane, metres
    double rms_error = 0.0;
    long long pixels = 0;
};

/// Max and RMS |linear - exact| over the pane for a given alpha.
inline AlphaCalibration evaluate_alpha(const TiltedPaneSetup& s, const CameraIntrinsics& k, double alpha) {
    FusedDepthFrame lin(s.scene.frame), exact(s.scene.frame);
    linear_gradient_fill(s.pane, s.speckle, k, alpha, lin);
    plane_intersection_fill(s.pane, estimate_plane(s.speckle, k), k, exact);
    AlphaCalibration r;
    r.alpha = alpha;
    double sq = 0.0;
    for (int y = 0; y < s.pane.bbox.height; ++y)
        for (int x = 0; x < s.pane.bbox.width; ++x) {
            if (!s.pane.mask(x, y)) continue;
            const int u = s.pane.bbox.x + x, v = s.pane.bbox.y + y;
            if (!exact.synthesized(u, v)) continue;
            const double e = lin.frame.depth(u, v) - exact.frame.depth(u, v);
            r.max_abs_error = std::max(r.max_abs_error, std::abs(e));
            sq += e * e;
            ++r.pixels;
        }
    r.rms_error = r.pixels ? std::sqrt(sq / r.pixels) : 0.0;
    return r;
}

/// Least-squares alpha minimising sum (d_s + alpha*g(u) - z_exact(u))^2 with
/// g(u) = d_s (u_s - cx)(u - u_s), over every pane pixel.
inline AlphaCalibration calibrate_alpha(const CameraIntrinsics& k, double tilt_deg = 10.0, double distance = 2.0) {
    if (std::abs(tilt_deg) < 1e-9) throw ParameterError("calibrate_alpha: tilt must be non-zero");
    const TiltedPaneSetup s = make_tilted_pane(tilted_pane_scene(tilt_deg, distance), k);
    const GlassPlane plane = estimate_plane(s.speckle, k);
    const double ds = s.speckle.depth_m;
    double num = 0.0, den = 0.0;
    for (int y = 0; y < s.pane.bbox.height; ++y)
        for (int x = 0; x < s.pane.bbox.width; ++x) {
            if (!s.pane.mask(x, y)) continue;
            const int u = s.pane.bbox.x + x, v = s.pane.bbox.y + y;
            const double z = plane.depth_along(pixel_ray_z1(k, u, v));
            if (!(z > 0.0)) continue;
            const double g = ds * (s.speckle.u - k.cx) * (u - s.speckle.u);
            num += g * (z - ds);
            den += g * g;
        }
    if (!(den > 0.0)) throw ValidationError("calibrate_alpha: degenerate pane (no horizontal extent)");
    return evaluate_alpha(s, k, num / den);
}

}  // namespace specklemap
