#include "specklemap/calibration.hpp"
#include "specklemap/reprojection.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace specklemap;

namespace {

ConfirmedSpeckle speckle(double u, double v, double d) {
    ConfirmedSpeckle s;
    s.u = u;
    s.v = v;
    s.depth_m = d;
    return s;
}

Region block(Rect r) {
    Region reg;
    reg.bbox = r;
    reg.mask = Mask(r.width, r.height, 1);
    reg.area = r.area();
    return reg;
}

DepthFrame random_frame(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.0, 5.0);
    DepthFrame f(default_intrinsics(), 0.0);
    for (double& x : f.depth.data()) x = d(rng) < 1.5 ? 0.0 : d(rng);
    return f;
}

}  // namespace

TEST(EstimatePlane, PrincipalPointGivesFrontoParallel) {
    const CameraIntrinsics k = default_intrinsics();
    const GlassPlane p = estimate_plane(speckle(k.cx, k.cy, 2.0), k);
    EXPECT_NEAR(p.normal.z(), 1.0, 1e-12);
    EXPECT_NEAR(p.point.z(), 2.0, 1e-12);
    EXPECT_NEAR(p.depth_along(pixel_ray_z1(k, 10, 400)), 2.0, 1e-12);
}

TEST(EstimatePlane, FortyFiveDegreeRay) {
    CameraIntrinsics k;
    k.width = 1000;
    k.height = 480;
    k.fx = k.fy = 600.0;
    k.cx = 320.0;
    k.cy = 240.0;
    const GlassPlane p = estimate_plane(speckle(920, 240, 2.0), k);
    EXPECT_NEAR(p.normal.x(), std::sqrt(0.5), 1e-9);
    EXPECT_NEAR(p.normal.y(), 0.0, 1e-12);
    EXPECT_NEAR(p.normal.z(), std::sqrt(0.5), 1e-9);
    EXPECT_GT(p.normal.dot(p.point), 0.0);
}

TEST(EstimatePlane, RecoversTenDegreeTiltWithinOneDegree) {
    const CameraIntrinsics k = default_intrinsics();
    const TiltedPaneSetup s = make_tilted_pane(tilted_pane_scene(10.0, 2.0), k);
    const GlassPlane est = estimate_plane(s.speckle, k);
    const double angle = std::acos(std::clamp(est.normal.dot(s.true_plane.normal), -1.0, 1.0)) / kDegToRad;
    EXPECT_LT(angle, 1.0);
}

TEST(EstimatePlane, NonPositiveDepthRejected) {
    EXPECT_THROW(estimate_plane(speckle(320, 240, 0.0), default_intrinsics()), ParameterError);
}

TEST(LinearFill, CentredSpeckleFillsUniformly) {
    const CameraIntrinsics k = default_intrinsics();
    FusedDepthFrame out(DepthFrame(k, 0.0));
    linear_gradient_fill(block({200, 150, 100, 80}), speckle(k.cx, 200, 2.0), k, -3e-6, out);
    for (int v = 150; v < 230; ++v)
        for (int u = 200; u < 300; ++u) EXPECT_EQ(out.frame.depth(u, v), 2.0);
}

TEST(LinearFill, SlopeProportionalToAlpha) {
    const CameraIntrinsics k = default_intrinsics();
    const Region r = block({100, 100, 200, 50});
    const ConfirmedSpeckle s = speckle(150, 120, 2.0);
    FusedDepthFrame a(DepthFrame(k, 0.0)), b(DepthFrame(k, 0.0));
    linear_gradient_fill(r, s, k, -3e-6, a);
    linear_gradient_fill(r, s, k, -6e-6, b);
    for (int u = 100; u < 300; ++u) {
        const double da = a.frame.depth(u, 110) - 2.0, db = b.frame.depth(u, 110) - 2.0;
        EXPECT_NEAR(db, 2.0 * da, 1e-12);
        EXPECT_NEAR(da, -3e-6 * 2.0 * (150 - k.cx) * (u - 150), 1e-12);
    }
}

TEST(LinearFill, ZeroAlphaIsConstant) {
    const CameraIntrinsics k = default_intrinsics();
    FusedDepthFrame out(DepthFrame(k, 0.0));
    linear_gradient_fill(block({0, 0, 640, 480}), speckle(17, 33, 1.25), k, 0.0, out);
    for (double d : out.frame.depth.data()) EXPECT_EQ(d, 1.25);
}

TEST(LinearFill, NegativeDepthsClampedAndCounted) {
    const CameraIntrinsics k = default_intrinsics();
    FusedDepthFrame out(DepthFrame(k, 0.0));
    linear_gradient_fill(block({0, 0, 640, 1}), speckle(600, 0, 1.0), k, -1e-4, out, 0.05);
    EXPECT_GT(out.clamped_pixels, 0);
    for (int u = 0; u < 640; ++u) EXPECT_GT(out.frame.depth(u, 0), 0.0);
}

TEST(ExactFill, FrontoParallelIsConstant) {
    const CameraIntrinsics k = default_intrinsics();
    FusedDepthFrame out(DepthFrame(k, 0.0));
    GlassPlane p;
    p.point = {0.3, -0.1, 2.0};
    p.normal = {0, 0, 1};
    plane_intersection_fill(block({0, 0, 640, 480}), p, k, out);
    for (double d : out.frame.depth.data()) EXPECT_NEAR(d, 2.0, 1e-12);
}

TEST(ExactFill, YawedPlaneMonotoneAcrossColumns) {
    const CameraIntrinsics k = default_intrinsics();
    FusedDepthFrame out(DepthFrame(k, 0.0));
    GlassPlane p;
    p.point = {0, 0, 2.0};
    p.normal = Eigen::Vector3d(std::sin(10 * kDegToRad), 0, std::cos(10 * kDegToRad));
    plane_intersection_fill(block({0, 200, 640, 1}), p, k, out);
    for (int u = 1; u < 640; ++u) EXPECT_LT(out.frame.depth(u, 200), out.frame.depth(u - 1, 200));
}

TEST(ExactFill, RandomPlanesMatchClosedForm) {
    // independent substitution: z = (n . p) / (n_x x' + n_y y' + n_z) with x' = (u - cx)/fx
    const CameraIntrinsics k = default_intrinsics();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> a(-0.5, 0.5), z(1.0, 4.0);
    std::uniform_int_distribution<int> U(0, 639), V(0, 479);
    for (int trial = 0; trial < 50; ++trial) {
        GlassPlane p;
        p.normal = Eigen::Vector3d(a(rng), a(rng), 1.0).normalized();
        p.point = {a(rng), a(rng), z(rng)};
        FusedDepthFrame out(DepthFrame(k, 0.0));
        plane_intersection_fill(block({0, 0, 640, 480}), p, k, out);
        const double c = p.normal.x() * p.point.x() + p.normal.y() * p.point.y() + p.normal.z() * p.point.z();
        for (int i = 0; i < 50; ++i) {
            const int u = U(rng), v = V(rng);
            const double xp = (u - k.cx) / k.fx, yp = (v - k.cy) / k.fy;
            const double expect = c / (p.normal.x() * xp + p.normal.y() * yp + p.normal.z());
            EXPECT_NEAR(out.frame.depth(u, v), expect, 1e-9);
        }
    }
}

TEST(ExactFill, ParallelRayLeftUntouched) {
    CameraIntrinsics k = default_intrinsics();
    GlassPlane p;
    p.point = {1.0, 0.0, 0.0};
    p.normal = {1.0, 0.0, 0.0};  // plane x = 1 contains the optical axis direction
    FusedDepthFrame out(DepthFrame(k, 0.0));
    plane_intersection_fill(block({static_cast<int>(k.cx), static_cast<int>(k.cy), 1, 1}), p, k, out);
    EXPECT_EQ(out.synthesized_count(), 0);
}

TEST(ExactFill, ReproducesGeneratorDepthOnTiltedPanes) {
    const CameraIntrinsics k = default_intrinsics();
    for (double tilt : {0.0, 5.0, 10.0, 15.0}) {
        const TiltedPaneSetup s = make_tilted_pane(tilted_pane_scene(tilt, 2.0), k);
        FusedDepthFrame out(s.scene.frame);
        plane_intersection_fill(s.pane, s.true_plane, k, out);
        for (int v = 0; v < k.height; ++v)
            for (int u = 0; u < k.width; ++u)
                if (s.scene.truth.glass_mask(u, v)) {
                    ASSERT_NEAR(out.frame.depth(u, v), s.scene.truth.true_depth(u, v), 1e-6) << tilt;
                }
    }
}

TEST(Fusion, MeasuredPixelsPassThroughAndSupportEqualsMask) {
    const CameraIntrinsics k = default_intrinsics();
    std::mt19937_64 rng(103);
    for (int trial = 0; trial < 10; ++trial) {
        const DepthFrame f = random_frame(200 + trial);
        Region reg;
        reg.bbox = {150, 100, 200, 150};
        reg.mask = Mask(200, 150, 0);
        std::bernoulli_distribution b(0.4);
        for (auto& m : reg.mask.data()) m = b(rng);
        FusedDepthFrame lin(f), exact(f);
        linear_gradient_fill(reg, speckle(250, 170, 2.0), k, -2.8e-6, lin);
        plane_intersection_fill(reg, estimate_plane(speckle(250, 170, 2.0), k), k, exact);
        for (const FusedDepthFrame* out : {&lin, &exact})
            for (int v = 0; v < k.height; ++v)
                for (int u = 0; u < k.width; ++u) {
                    const bool in_mask = reg.contains(u, v);
                    EXPECT_EQ(out->synthesized(u, v), in_mask);
                    if (!in_mask) { EXPECT_EQ(out->frame.depth(u, v), f.depth(u, v)); }
                }
    }
}

TEST(Calibration, FittedAlphaMeetsTenAndFifteenDegreeBounds) {
    const CameraIntrinsics k = default_intrinsics();
    const AlphaCalibration cal = calibrate_alpha(k);
    EXPECT_LT(cal.alpha, 0.0);
    EXPECT_LE(cal.max_abs_error, 0.05);
    const auto fifteen = evaluate_alpha(make_tilted_pane(tilted_pane_scene(15.0, 2.0), k), k, cal.alpha);
    EXPECT_LE(fifteen.max_abs_error, 0.10);
    EXPECT_THROW(calibrate_alpha(k, 0.0), ParameterError);
}
