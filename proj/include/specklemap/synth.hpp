#pragma once

// Deterministic ray-cast scene generator: glass panes (specular, mostly
// invisible to ToF), opaque walls and clutter, sensor noise, plus the
// ground truth the evaluation compares against.

#include "specklemap/core.hpp"
#include "specklemap/reprojection.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

namespace specklemap {

/// Axis-aligned rectangle in a surface's local (x, y) coordinates, metres.
struct PlaneExtent {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;

    bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
    bool operator==(const PlaneExtent&) const = default;
};

/// Glass pane through world point (0, 0, distance), rotated by yaw about the
/// vertical axis. Local x runs along the pane, local y is world y.
struct Pane {
    double distance = 2.0;
    double yaw_deg = 0.0;
    PlaneExtent extent{-0.6, 0.6, -0.45, 0.45};
    std::vector<PlaneExtent> stickers;  // opaque patches on the glass

    bool operator==(const Pane&) const = default;
};

/// Opaque planar surface, same parametrisation as Pane, optionally with
/// see-through openings (window frames).
struct Wall {
    double distance = 2.0;
    double yaw_deg = 0.0;
    PlaneExtent extent{-5.0, 5.0, -5.0, 5.0};
    std::vector<PlaneExtent> openings;

    bool operator==(const Wall&) const = default;
};

/// Fronto-parallel opaque box face at world z = first pane distance + depth_offset.
/// Extent is in world x / y.
struct ClutterBox {
    PlaneExtent extent{-0.2, 0.2, -0.2, 0.2};
    double depth_offset = 1.0;

    bool operator==(const ClutterBox&) const = default;
};

struct SensorPose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw_deg = 0.0;

    bool operator==(const SensorPose&) const = default;
};

struct NoiseModel {
    double sigma = 0.0;    // metres, additive gaussian on valid pixels
    double dropout = 0.0;  // probability a valid pixel is lost

    bool operator==(const NoiseModel&) const = default;
};

struct SpeckleModel {
    int radius_px = 15;
    double render_probability = 1.0;
    double max_incidence_deg = 20.0;

    bool operator==(const SpeckleModel&) const = default;
};

struct SceneSpec {
    std::vector<Pane> panes;
    std::vector<Wall> walls;
    std::vector<ClutterBox> clutter;
    SensorPose pose;
    NoiseModel noise;
    SpeckleModel speckle;
    std::uint64_t seed = 0;
    double timestamp = 0.0;
    double tof_max_range = kMaxDepthM;
    double sonar_max_range = 5.0;
    // ToF light passes through glass and returns from whatever opaque surface is behind it.
    bool glass_transmits = true;

    void validate() const {
        for (const Pane& p : panes)
            if (!(p.distance > 0.0)) throw ParameterError("scene: pane distance must be > 0");
        if (!(noise.sigma >= 0.0)) throw ParameterError("scene: noise sigma must be >= 0");
        if (!(noise.dropout >= 0.0 && noise.dropout < 1.0)) throw ParameterError("scene: dropout must be in [0, 1)");
        if (speckle.radius_px < 0) throw ParameterError("scene: speckle radius must be >= 0");
        if (!(speckle.render_probability >= 0.0 && speckle.render_probability <= 1.0))
            throw ParameterError("scene: speckle render probability must be in [0, 1]");
        if (!(tof_max_range > 0.0) || !(sonar_max_range > 0.0)) throw ParameterError("scene: ranges must be > 0");
    }

    bool operator==(const SceneSpec&) const = default;
};

struct GroundTruth {
    Mask glass_mask;                                   // ray meets glass before anything opaque
    std::vector<GlassPlane> true_planes;               // camera frame, one per pane
    Grid<double> true_depth;                           // glass rendered as solid; 0 where nothing is hit
    std::vector<std::optional<std::pair<int, int>>> speckle_pixels;  // per pane, when rendered
};

struct RenderedScene {
    DepthFrame frame;
    SonarReading sonar;
    GroundTruth truth;
};

namespace detail {

struct WorldPlane {
    Eigen::Vector3d anchor;
    Eigen::Vector3d normal;
    Eigen::Vector3d ex;
    Eigen::Vector3d ey;

    static WorldPlane yawed(double distance, double yaw_deg) {
        const double a = yaw_deg * kDegToRad;
        return {{0.0, 0.0, distance},
                {std::sin(a), 0.0, std::cos(a)},
                {std::cos(a), 0.0, -std::sin(a)},
                {0.0, 1.0, 0.0}};
    }

    /// Ray parameter of the hit (inf when none) and local coordinates.
    double intersect(const Eigen::Vector3d& o, const Eigen::Vector3d& d, double& lx, double& ly) const {
        const double denom = normal.dot(d);
        if (std::abs(denom) < 1e-12) return std::numeric_limits<double>::infinity();
        const double t = normal.dot(anchor - o) / denom;
        if (!(t > 1e-9)) return std::numeric_limits<double>::infinity();
        const Eigen::Vector3d rel = o + t * d - anchor;
        lx = ex.dot(rel);
        ly = ey.dot(rel);
        return t;
    }
};

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    int pane = -1;  // index when the hit is glass
};

/// Rotation taking camera-frame directions to world (yaw about +y).
inline Eigen::Matrix3d camera_to_world(const SensorPose& pose) {
    const double a = pose.yaw_deg * kDegToRad;
    Eigen::Matrix3d r;
    r << std::cos(a), 0.0, std::sin(a),  //
        0.0, 1.0, 0.0,                    //
        -std::sin(a), 0.0, std::cos(a);
    return r;
}

class SceneCaster {
public:
    explicit SceneCaster(const SceneSpec& spec) : spec_(spec) {
        for (const Pane& p : spec.panes) panes_.push_back(WorldPlane::yawed(p.distance, p.yaw_deg));
        for (const Wall& w : spec.walls) walls_.push_back(WorldPlane::yawed(w.distance, w.yaw_deg));
        const double base = spec.panes.empty() ? 0.0 : spec.panes.front().distance;
        for (const ClutterBox& c : spec.clutter)
            clutter_.push_back({{0.0, 0.0, base + c.depth_offset}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
    }

    const std::vector<WorldPlane>& pane_planes() const { return panes_; }

    /// Nearest opaque hit and nearest glass hit along a world ray, optionally
    /// ignoring one pane.
    void cast(const Eigen::Vector3d& o, const Eigen::Vector3d& d, Hit& opaque, Hit& glass, int skip_pane = -1) const {
        double lx = 0.0, ly = 0.0;
        for (std::size_t i = 0; i < walls_.size(); ++i) {
            const double t = walls_[i].intersect(o, d, lx, ly);
            if (!(t < opaque.t)) continue;
            const Wall& w = spec_.walls[i];
            if (!w.extent.contains(lx, ly)) continue;
            bool in_opening = false;
            for (const PlaneExtent& op : w.openings) in_opening = in_opening || op.contains(lx, ly);
            if (!in_opening) opaque.t = t;
        }
        for (std::size_t i = 0; i < clutter_.size(); ++i) {
            const double t = clutter_[i].intersect(o, d, lx, ly);
            if (t < opaque.t && spec_.clutter[i].extent.contains(lx, ly)) opaque.t = t;
        }
        for (std::size_t i = 0; i < panes_.size(); ++i) {
            if (static_cast<int>(i) == skip_pane) continue;
            const double t = panes_[i].intersect(o, d, lx, ly);
            const Pane& p = spec_.panes[i];
            if (!p.extent.contains(lx, ly)) continue;
            bool sticker = false;
            for (const PlaneExtent& s : p.stickers) sticker = sticker || s.contains(lx, ly);
            if (sticker) {
                if (t < opaque.t) opaque.t = t;
            } else if (t < glass.t) {
                glass.t = t;
                glass.pane = static_cast<int>(i);
            }
        }
    }

private:
    const SceneSpec& spec_;
    std::vector<WorldPlane> panes_;
    std::vector<WorldPlane> walls_;
    std::vector<WorldPlane> clutter_;
};

}  // namespace detail

/// Ray-casts the scene. Glass is invisible to the ToF sensor except inside a
/// disk around each pane's perpendicular-reflection pixel (and on stickers);
/// the sonar is a single axial ray that does see glass.
inline RenderedScene render_scene(const SceneSpec& spec, const CameraIntrinsics& k) {
    spec.validate();
    k.validate();
    const detail::SceneCaster caster(spec);
    const Eigen::Matrix3d r_cw = detail::camera_to_world(spec.pose);
    const Eigen::Matrix3d r_wc = r_cw.transpose();
    const Eigen::Vector3d origin(spec.pose.x, spec.pose.y, spec.pose.z);
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    RenderedScene out;
    out.frame = DepthFrame(k, spec.timestamp);
    out.truth.glass_mask = Mask(k.width, k.height, 0);
    out.truth.true_depth = Grid<double>(k.width, k.height, 0.0);

    // Perpendicular-reflection pixel and true plane per pane.
    std::vector<std::optional<std::pair<int, int>>> speckle_px(spec.panes.size());
    for (std::size_t i = 0; i < spec.panes.size(); ++i) {
        const auto& wp = caster.pane_planes()[i];
        Eigen::Vector3d n_c = r_wc * wp.normal;
        const Eigen::Vector3d a_c = r_wc * (wp.anchor - origin);
        double offset = n_c.dot(a_c);
        if (offset < 0.0) {
            n_c = -n_c;
            offset = -offset;
        }
        const Eigen::Vector3d foot = offset * n_c;
        out.truth.true_planes.push_back({foot, n_c});

        const bool drawn = uniform(rng) < spec.speckle.render_probability;
        if (!drawn || !(offset > 0.0) || !(n_c.z() > 0.0)) continue;
        if (std::acos(std::clamp(n_c.z(), -1.0, 1.0)) > spec.speckle.max_incidence_deg * kDegToRad) continue;

        double u = 0.0, v = 0.0;
        if (!project(k, foot, u, v)) continue;
        const int iu = static_cast<int>(std::lround(u)), iv = static_cast<int>(std::lround(v));
        if (!(iu >= 0 && iv >= 0 && iu < k.width && iv < k.height)) continue;

        // The reflection only exists if the glass at the foot is the first thing the ray meets.
        detail::Hit opaque, glass;
        caster.cast(origin, r_cw * pixel_ray_z1(k, u, v), opaque, glass);
        if (glass.pane != static_cast<int>(i) || !(glass.t < opaque.t)) continue;
        speckle_px[i] = std::pair{iu, iv};
    }
    out.truth.speckle_pixels = speckle_px;

    const long long sr2 = static_cast<long long>(spec.speckle.radius_px) * spec.speckle.radius_px;
    for (int v = 0; v < k.height; ++v)
        for (int u = 0; u < k.width; ++u) {
            detail::Hit opaque, glass;
            caster.cast(origin, r_cw * pixel_ray_z1(k, u, v), opaque, glass);
            double measured = 0.0;
            if (glass.t < opaque.t) {
                out.truth.glass_mask(u, v) = 1;
                out.truth.true_depth(u, v) = glass.t;
                const auto& sp = speckle_px[glass.pane];
                const bool in_speckle = sp && static_cast<long long>(u - sp->first) * (u - sp->first) +
                                                      static_cast<long long>(v - sp->second) * (v - sp->second) <=
                                                  sr2;
                if (in_speckle) {
                    measured = glass.t;
                } else if (spec.glass_transmits && std::isfinite(opaque.t)) {
                    measured = opaque.t;
                }
            } else if (std::isfinite(opaque.t)) {
                out.truth.true_depth(u, v) = opaque.t;
                measured = opaque.t;
            }
            if (measured > spec.tof_max_range) measured = 0.0;
            out.frame.depth(u, v) = measured;
        }

    if (spec.noise.sigma > 0.0 || spec.noise.dropout > 0.0) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (double& d : out.frame.depth.data()) {
            if (!(d > 0.0)) continue;
            const double n = gauss(rng);
            const double drop = uniform(rng);
            d = std::clamp(d + spec.noise.sigma * n, 1e-3, kMaxDepthM);
            if (drop < spec.noise.dropout) d = 0.0;
        }
    }

    detail::Hit opaque, glass;
    caster.cast(origin, r_cw * Eigen::Vector3d(0.0, 0.0, 1.0), opaque, glass);
    const double first = std::min(opaque.t, glass.t);
    out.sonar.timestamp = spec.timestamp;
    out.sonar.max_range = spec.sonar_max_range;
    out.sonar.range = first <= spec.sonar_max_range ? first : spec.sonar_max_range;
    return out;
}

}  // namespace specklemap
