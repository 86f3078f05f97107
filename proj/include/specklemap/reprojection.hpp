#pragma once

// Writing synthesized glass depth into a matched empty region: the linear
// horizontal-gradient model and the exact ray/plane intersection.

#include "specklemap/core.hpp"
#include "specklemap/segmentation.hpp"
#include "specklemap/tracker.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace specklemap {

struct GlassPlane {
    Eigen::Vector3d point{0.0, 0.0, 1.0};
    Eigen::Vector3d normal{0.0, 0.0, 1.0};  // unit, oriented away from the camera

    /// z-depth where the z == 1 ray `r` meets the plane, or 0 when parallel or behind.
    double depth_along(const Eigen::Vector3d& r) const {
        const double denom = r.dot(normal);
        if (std::abs(denom) < 1e-6 * r.norm()) return 0.0;
        const double t = point.dot(normal) / denom;
        return t > 0.0 ? t * r.z() : 0.0;
    }
};

enum class Provenance : std::uint8_t { measured = 0, synthesized = 1 };

struct FusedDepthFrame {
    DepthFrame frame;
    Mask provenance;  // Provenance values
    long long clamped_pixels = 0;

    explicit FusedDepthFrame(const DepthFrame& input)
        : frame(input), provenance(input.width(), input.height(), static_cast<std::uint8_t>(Provenance::measured)) {}

    bool synthesized(int u, int v) const { return provenance(u, v) == static_cast<std::uint8_t>(Provenance::synthesized); }
    Mask synthesized_mask() const { return provenance; }
    long long synthesized_count() const {
        return static_cast<long long>(std::count(provenance.data().begin(), provenance.data().end(),
                                                 static_cast<std::uint8_t>(Provenance::synthesized)));
    }
};

/// Plane through the back-projected speckle, normal along the speckle's ray.
inline GlassPlane estimate_plane(const ConfirmedSpeckle& speckle, const CameraIntrinsics& k) {
    if (!(speckle.depth_m > 0.0)) throw ParameterError("estimate_plane: speckle depth must be > 0");
    const Ray ray = ray_direction(k, speckle.u, speckle.v);
    GlassPlane plane;
    plane.normal = ray.direction;
    plane.point = ray.direction * (speckle.depth_m / ray.direction.z());
    return plane;
}

/// depth(u, v) = d_s + alpha * d_s * (u_s - cx) * (u - u_s) over the region.
/// Non-positive results are clamped to min_depth and counted.
inline void linear_gradient_fill(const Region& region, const ConfirmedSpeckle& speckle, const CameraIntrinsics& k,
                                 double alpha, FusedDepthFrame& out, double min_depth = 0.05) {
    const double ds = speckle.depth_m;
    const double slope = alpha * ds * (speckle.u - k.cx);
    for (int y = 0; y < region.bbox.height; ++y)
        for (int x = 0; x < region.bbox.width; ++x) {
            if (!region.mask(x, y)) continue;
            const int u = region.bbox.x + x, v = region.bbox.y + y;
            double d = ds + slope * (u - speckle.u);
            if (!(d > 0.0)) {
                d = min_depth;
                ++out.clamped_pixels;
            }
            out.frame.depth(u, v) = d;
            out.provenance(u, v) = static_cast<std::uint8_t>(Provenance::synthesized);
        }
}

/// Exact z-depth of each region pixel's ray against the plane. Pixels whose
/// ray is parallel to the plane or meets it behind the camera are left as they are.
inline void plane_intersection_fill(const Region& region, const GlassPlane& plane, const CameraIntrinsics& k,
                                    FusedDepthFrame& out) {
    for (int y = 0; y < region.bbox.height; ++y)
        for (int x = 0; x < region.bbox.width; ++x) {
            if (!region.mask(x, y)) continue;
            const int u = region.bbox.x + x, v = region.bbox.y + y;
            const double d = plane.depth_along(pixel_ray_z1(k, u, v));
            if (!(d > 0.0)) continue;
            out.frame.depth(u, v) = d;
            out.provenance(u, v) = static_cast<std::uint8_t>(Provenance::synthesized);
        }
}

}  // namespace specklemap
