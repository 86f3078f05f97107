#pragma once

// Shared domain types: raster grids, pinhole intrinsics, depth frames and
// sonar readings, plus the error hierarchy used across the library.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace specklemap {

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pixel or rectangle outside the image.
struct BoundsError : Error {
    using Error::Error;
};

/// Invalid algorithm parameter (radius, threshold, band...).
struct ParameterError : Error {
    using Error::Error;
};

/// Shapes that should agree do not (grid vs intrinsics, mask vs mask).
struct StructuralError : Error {
    using Error::Error;
};

/// Input that is well-formed but fails a semantic check.
struct ValidationError : Error {
    using Error::Error;
};

/// Caller broke an ordering contract (e.g. non-monotone timestamps).
struct ContractError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at byte " + std::to_string(offset) + ")"), byte_offset(offset) {}
    std::size_t byte_offset;
};

struct RangeError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Grid

/// Row-major raster. Index as (u, v) = (column, row).
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(checked_size(width, height), fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width_ && v < height_; }

    T& operator()(int u, int v) { return data_[index(u, v)]; }
    const T& operator()(int u, int v) const { return data_[index(u, v)]; }

    T* row(int v) { return data_.data() + static_cast<std::size_t>(v) * width_; }
    const T* row(int v) const { return data_.data() + static_cast<std::size_t>(v) * width_; }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool operator==(const Grid&) const = default;

private:
    static std::size_t checked_size(int w, int h) {
        if (w < 0 || h < 0) throw ParameterError("grid dimensions must be non-negative");
        return static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    }
    std::size_t index(int u, int v) const {
        return static_cast<std::size_t>(v) * width_ + static_cast<std::size_t>(u);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using Mask = Grid<std::uint8_t>;

// ---------------------------------------------------------------------------
// Rect

/// Half-open pixel rectangle [x, x + width) x [y, y + height).
struct Rect {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    int x1() const { return x + width; }
    int y1() const { return y + height; }
    bool empty() const { return width <= 0 || height <= 0; }
    long long area() const { return empty() ? 0 : static_cast<long long>(width) * height; }

    bool contains(int u, int v) const { return u >= x && u < x1() && v >= y && v < y1(); }

    bool contains(const Rect& o) const {
        return o.x >= x && o.y >= y && o.x1() <= x1() && o.y1() <= y1();
    }

    static Rect from_corners(int x0, int y0, int x1, int y1) { return {x0, y0, x1 - x0, y1 - y0}; }

    bool operator==(const Rect&) const = default;
};

inline Rect intersect(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.x1(), b.x1());
    const int y1 = std::min(a.y1(), b.y1());
    if (x1 <= x0 || y1 <= y0) return {x0, y0, 0, 0};
    return Rect::from_corners(x0, y0, x1, y1);
}

/// Smallest rectangle covering both. Empty inputs are ignored.
inline Rect bounding_union(const Rect& a, const Rect& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return Rect::from_corners(std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x1(), b.x1()),
                              std::max(a.y1(), b.y1()));
}

inline double iou(const Rect& a, const Rect& b) {
    const long long inter = intersect(a, b).area();
    const long long uni = a.area() + b.area() - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

// ---------------------------------------------------------------------------
// Camera and frames

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kMaxDepthM = 10.0;
inline constexpr double kInvalidDepth = 0.0;

struct CameraIntrinsics {
    int width = 640;
    int height = 480;
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    double hfov_deg = 0.0;
    double vfov_deg = 0.0;

    /// Focal lengths from the field of view; principal point at the image centre.
    static CameraIntrinsics from_fov(int width, int height, double hfov_deg, double vfov_deg) {
        CameraIntrinsics k;
        k.width = width;
        k.height = height;
        k.hfov_deg = hfov_deg;
        k.vfov_deg = vfov_deg;
        k.fx = (width / 2.0) / std::tan(hfov_deg * kDegToRad / 2.0);
        k.fy = (height / 2.0) / std::tan(vfov_deg * kDegToRad / 2.0);
        k.cx = width / 2.0;
        k.cy = height / 2.0;
        k.validate();
        return k;
    }

    void validate() const {
        if (width <= 0 || height <= 0) throw ParameterError("intrinsics: image size must be positive");
        if (!(fx > 0.0) || !(fy > 0.0)) throw ParameterError("intrinsics: focal lengths must be positive");
        if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
            throw ParameterError("intrinsics: principal point outside the image");
    }

    bool operator==(const CameraIntrinsics&) const = default;
};

/// 640x480 with a 56 x 44 degree field of view.
inline CameraIntrinsics default_intrinsics() { return CameraIntrinsics::from_fov(640, 480, 56.0, 44.0); }

/// z-depth image in metres; 0 marks "no return".
struct DepthFrame {
    CameraIntrinsics intrinsics = default_intrinsics();
    double timestamp = 0.0;
    Grid<double> depth;

    DepthFrame() = default;
    DepthFrame(const CameraIntrinsics& k, double t)
        : intrinsics(k), timestamp(t), depth(k.width, k.height, kInvalidDepth) {}

    int width() const { return depth.width(); }
    int height() const { return depth.height(); }
    bool valid(int u, int v) const { return depth(u, v) > 0.0; }
};

struct SonarReading {
    double range = 0.0;
    double timestamp = 0.0;
    double max_range = 5.0;

    void validate() const {
        if (!(max_range > 0.0)) throw ParameterError("sonar: max_range must be positive");
        if (!(range > 0.0 && range <= max_range)) throw ParameterError("sonar: range outside (0, max_range]");
    }
};

struct Ray {
    Eigen::Vector3d direction{0.0, 0.0, 1.0};
};

/// Unit ray through pixel (u, v) in the camera frame (+z forward).
inline Ray ray_direction(const CameraIntrinsics& k, double u, double v) {
    if (!(u >= 0.0 && u < k.width && v >= 0.0 && v < k.height))
        throw BoundsError("ray_direction: pixel (" + std::to_string(u) + ", " + std::to_string(v) +
                          ") outside the image");
    Eigen::Vector3d d((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
    return Ray{d.normalized()};
}

/// Same as ray_direction but scaled so z == 1 (so t along it is z-depth). No bounds check.
inline Eigen::Vector3d pixel_ray_z1(const CameraIntrinsics& k, double u, double v) {
    return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

/// Projects a camera-frame point; returns false when it lies behind the camera.
inline bool project(const CameraIntrinsics& k, const Eigen::Vector3d& p, double& u, double& v) {
    if (!(p.z() > 0.0)) return false;
    u = k.cx + k.fx * p.x() / p.z();
    v = k.cy + k.fy * p.y() / p.z();
    return true;
}

/// Checks grid/intrinsics agreement and invalidates negative, non-finite and
/// out-of-range depths.
inline DepthFrame validate_frame(DepthFrame frame) {
    frame.intrinsics.validate();
    if (frame.depth.width() != frame.intrinsics.width || frame.depth.height() != frame.intrinsics.height)
        throw StructuralError("depth grid " + std::to_string(frame.depth.width()) + "x" +
                              std::to_string(frame.depth.height()) + " does not match intrinsics " +
                              std::to_string(frame.intrinsics.width) + "x" +
                              std::to_string(frame.intrinsics.height));
    for (double& d : frame.depth.data()) {
        if (!std::isfinite(d) || d < 0.0 || d > kMaxDepthM) d = kInvalidDepth;
    }
    return frame;
}

/// 1 where depth is valid.
inline Mask validity_mask(const DepthFrame& frame) {
    Mask m(frame.width(), frame.height(), 0);
    const auto& src = frame.depth.data();
    auto& dst = m.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > 0.0 ? 1 : 0;
    return m;
}

}  // namespace specklemap
