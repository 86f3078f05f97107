#include "specklemap/core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace specklemap;

TEST(RayDirection, PrincipalPointIsOpticalAxis) {
    const CameraIntrinsics k = default_intrinsics();
    const Ray r = ray_direction(k, k.cx, k.cy);
    EXPECT_DOUBLE_EQ(r.direction.x(), 0.0);
    EXPECT_DOUBLE_EQ(r.direction.y(), 0.0);
    EXPECT_DOUBLE_EQ(r.direction.z(), 1.0);
}

TEST(RayDirection, FortyFiveDegreesByConstruction) {
    CameraIntrinsics k;
    k.width = 1000;
    k.height = 480;
    k.fx = k.fy = 600.0;
    k.cx = 320.0;
    k.cy = 240.0;
    const Ray r = ray_direction(k, 920, 240);
    EXPECT_NEAR(r.direction.x(), std::sqrt(0.5), 1e-12);
    EXPECT_NEAR(r.direction.y(), 0.0, 1e-12);
    EXPECT_NEAR(r.direction.z(), std::sqrt(0.5), 1e-12);
}

TEST(RayDirection, LeftEdgeMakesHalfFovWithAxis) {
    // fx recomputed here from the field of view, independently of from_fov
    const double fx = 320.0 / std::tan(28.0 * std::numbers::pi / 180.0);
    const CameraIntrinsics k = default_intrinsics();
    EXPECT_NEAR(k.fx, fx, 1e-9);
    const Ray r = ray_direction(k, 0, k.cy);
    const double angle = std::acos(r.direction.z()) * 180.0 / std::numbers::pi;
    EXPECT_NEAR(angle, 28.0, 1e-9);
}

TEST(RayDirection, OutOfBoundsThrows) {
    const CameraIntrinsics k = default_intrinsics();
    EXPECT_THROW(ray_direction(k, -1, 0), BoundsError);
    EXPECT_THROW(ray_direction(k, 640, 0), BoundsError);
    EXPECT_THROW(ray_direction(k, 0, 480), BoundsError);
}

TEST(RayDirection, UnitLengthAndForwardEverywhere) {
    const CameraIntrinsics k = default_intrinsics();
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> U(0, 639), V(0, 479);
    for (int i = 0; i < 1000; ++i) {
        const Ray r = ray_direction(k, U(rng), V(rng));
        EXPECT_NEAR(r.direction.norm(), 1.0, 1e-9);
        EXPECT_GT(r.direction.z(), 0.0);
    }
}

TEST(RayDirection, DoublingFocalLengthHalvesLateralComponents) {
    CameraIntrinsics a = default_intrinsics();
    CameraIntrinsics b = a;
    b.fx *= 2.0;
    b.fy *= 2.0;
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> U(0, 639), V(0, 479);
    for (int i = 0; i < 200; ++i) {
        const int u = U(rng), v = V(rng);
        const Eigen::Vector3d ra = ray_direction(a, u, v).direction;
        const Eigen::Vector3d rb = ray_direction(b, u, v).direction;
        // undo the normalisation: lateral / z is the pre-normalisation component
        EXPECT_NEAR(rb.x() / rb.z(), 0.5 * ra.x() / ra.z(), 1e-12);
        EXPECT_NEAR(rb.y() / rb.z(), 0.5 * ra.y() / ra.z(), 1e-12);
    }
}

TEST(Intrinsics, InvariantsEnforced) {
    CameraIntrinsics k = default_intrinsics();
    EXPECT_NO_THROW(k.validate());
    k.cx = 640.0;
    EXPECT_THROW(k.validate(), ParameterError);
    k = default_intrinsics();
    k.fy = 0.0;
    EXPECT_THROW(k.validate(), ParameterError);
    k = default_intrinsics();
    k.width = 0;
    EXPECT_THROW(k.validate(), ParameterError);
}

TEST(ValidateFrame, AllZerosUnchanged) {
    DepthFrame f(default_intrinsics(), 0.0);
    EXPECT_EQ(validate_frame(f).depth, f.depth);
}

TEST(ValidateFrame, NegativeBecomesInvalid) {
    DepthFrame f(default_intrinsics(), 0.0);
    f.depth(10, 20) = -1.0;
    f.depth(11, 20) = 1.5;
    const DepthFrame g = validate_frame(f);
    EXPECT_EQ(g.depth(10, 20), 0.0);
    EXPECT_EQ(g.depth(11, 20), 1.5);
}

TEST(ValidateFrame, NonFiniteAndOverRangeBecomeInvalid) {
    DepthFrame f(default_intrinsics(), 0.0);
    f.depth(0, 0) = std::numeric_limits<double>::quiet_NaN();
    f.depth(1, 0) = std::numeric_limits<double>::infinity();
    f.depth(2, 0) = 10.5;
    f.depth(3, 0) = 10.0;
    const DepthFrame g = validate_frame(f);
    EXPECT_EQ(g.depth(0, 0), 0.0);
    EXPECT_EQ(g.depth(1, 0), 0.0);
    EXPECT_EQ(g.depth(2, 0), 0.0);
    EXPECT_EQ(g.depth(3, 0), 10.0);
}

TEST(ValidateFrame, DimensionMismatchIsStructuralError) {
    DepthFrame f(default_intrinsics(), 0.0);
    f.intrinsics.width = 639;
    f.intrinsics.cx = 319.5;
    EXPECT_THROW(validate_frame(f), StructuralError);
}

TEST(ValidateFrame, Idempotent) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> d(-2.0, 12.0);
    DepthFrame f(default_intrinsics(), 0.0);
    for (double& x : f.depth.data()) x = d(rng);
    const DepthFrame once = validate_frame(f);
    EXPECT_EQ(validate_frame(once).depth, once.depth);
}

TEST(Sonar, RangeInvariant) {
    SonarReading s;
    s.range = 2.0;
    EXPECT_NO_THROW(s.validate());
    s.range = 0.0;
    EXPECT_THROW(s.validate(), ParameterError);
    s.range = 5.5;
    EXPECT_THROW(s.validate(), ParameterError);
    EXPECT_EQ(SonarReading{}.max_range, 5.0);
}

TEST(RectIou, HandComputed) {
    EXPECT_NEAR(iou(Rect{0, 0, 10, 10}, Rect{5, 0, 10, 10}), 50.0 / 150.0, 1e-12);
    EXPECT_EQ(iou(Rect{0, 0, 10, 10}, Rect{20, 0, 10, 10}), 0.0);
    EXPECT_EQ(iou(Rect{0, 0, 10, 10}, Rect{0, 0, 10, 10}), 1.0);
}
