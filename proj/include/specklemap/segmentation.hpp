#pragma once

// Empty-region segmentation of the gated frame, bbox NMS merging, and
// speckle-to-region lookup.

#include "specklemap/core.hpp"
#include "specklemap/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

namespace specklemap {

struct Region {
    int id = 0;
    Rect bbox;
    Mask mask;  // bbox-sized, 1 = member
    long long area = 0;
    bool touches_border = false;

    bool contains(int u, int v) const { return bbox.contains(u, v) && mask(u - bbox.x, v - bbox.y); }
};

struct SegmentationOptions {
    long long min_area = 400;
    // Components whose border-touching pixel count exceeds this fraction of
    // the image perimeter are discarded. 1.0 keeps every component.
    double border_tolerance = 1.0;
    // Pixels inside this rectangle never count as empty (e.g. a sensor mount
    // obstructing part of the view).
    std::optional<Rect> exclusion;
};

/// 8-connected components of invalid pixels, area >= min_area, sorted by
/// descending area then raster order of their first pixel. Ids follow that order.
inline std::vector<Region> segment_empty_regions(const DepthFrame& frame, const SegmentationOptions& opts = {}) {
    const int W = frame.width(), H = frame.height();
    Mask empty(W, H, 0);
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u)
            if (!(frame.depth(u, v) > 0.0) && !(opts.exclusion && opts.exclusion->contains(u, v))) empty(u, v) = 1;

    struct Raw {
        Rect bbox;
        long long area;
        long long border;
        int first_u, first_v;
        int label;
    };
    Grid<int> labels(W, H, 0);
    std::vector<Raw> raws;
    std::vector<std::pair<int, int>> stack;
    for (int v = 0; v < H; ++v)
        for (int u = 0; u < W; ++u) {
            if (!empty(u, v) || labels(u, v)) continue;
            const int label = static_cast<int>(raws.size()) + 1;
            Raw r{{}, 0, 0, u, v, label};
            int x0 = u, x1 = u, y0 = v, y1 = v;
            stack.clear();
            stack.emplace_back(u, v);
            labels(u, v) = label;
            while (!stack.empty()) {
                auto [pu, pv] = stack.back();
                stack.pop_back();
                ++r.area;
                if (pu == 0 || pv == 0 || pu == W - 1 || pv == H - 1) ++r.border;
                x0 = std::min(x0, pu);
                x1 = std::max(x1, pu);
                y0 = std::min(y0, pv);
                y1 = std::max(y1, pv);
                for (int dv = -1; dv <= 1; ++dv)
                    for (int du = -1; du <= 1; ++du) {
                        const int nu = pu + du, nv = pv + dv;
                        if ((du || dv) && empty.contains(nu, nv) && empty(nu, nv) && !labels(nu, nv)) {
                            labels(nu, nv) = label;
                            stack.emplace_back(nu, nv);
                        }
                    }
            }
            r.bbox = Rect::from_corners(x0, y0, x1 + 1, y1 + 1);
            raws.push_back(r);
        }

    const double perimeter = 2.0 * (W + H) - 4.0;
    std::vector<Raw> kept;
    for (const Raw& r : raws) {
        if (r.area < opts.min_area) continue;
        if (static_cast<double>(r.border) > opts.border_tolerance * perimeter) continue;
        kept.push_back(r);
    }
    std::sort(kept.begin(), kept.end(), [](const Raw& a, const Raw& b) {
        if (a.area != b.area) return a.area > b.area;
        return std::tie(a.first_v, a.first_u) < std::tie(b.first_v, b.first_u);
    });

    std::vector<Region> out;
    out.reserve(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const Raw& r = kept[i];
        Region reg;
        reg.id = static_cast<int>(i);
        reg.bbox = r.bbox;
        reg.area = r.area;
        reg.touches_border = r.border > 0;
        reg.mask = Mask(r.bbox.width, r.bbox.height, 0);
        for (int v = r.bbox.y; v < r.bbox.y1(); ++v)
            for (int u = r.bbox.x; u < r.bbox.x1(); ++u)
                if (labels(u, v) == r.label) reg.mask(u - r.bbox.x, v - r.bbox.y) = 1;
        out.push_back(std::move(reg));
    }
    return out;
}

/// Union of two regions' masks over their combined bbox; keeps a's id.
inline Region merge_regions(const Region& a, const Region& b) {
    Region m;
    m.id = a.id;
    m.bbox = bounding_union(a.bbox, b.bbox);
    m.touches_border = a.touches_border || b.touches_border;
    m.mask = Mask(m.bbox.width, m.bbox.height, 0);
    for (const Region* r : {&a, &b})
        for (int y = 0; y < r->bbox.height; ++y)
            for (int x = 0; x < r->bbox.width; ++x)
                if (r->mask(x, y)) m.mask(r->bbox.x + x - m.bbox.x, r->bbox.y + y - m.bbox.y) = 1;
    m.area = static_cast<long long>(std::count(m.mask.data().begin(), m.mask.data().end(), 1));
    return m;
}

/// Greedy bbox NMS by descending area: a region whose bbox IoU with a kept
/// region exceeds iou_max is folded into it. Repeats until no pair of outputs
/// exceeds iou_max.
inline std::vector<Region> nms_merge(std::vector<Region> regions, double iou_max) {
    if (!(iou_max > 0.0 && iou_max < 1.0)) throw ParameterError("nms_merge: iou_max must be in (0, 1)");
    bool changed = true;
    while (changed) {
        changed = false;
        std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
            if (a.area != b.area) return a.area > b.area;
            return a.id < b.id;
        });
        std::vector<Region> kept;
        for (Region& r : regions) {
            auto it = std::find_if(kept.begin(), kept.end(),
                                   [&](const Region& k) { return iou(k.bbox, r.bbox) > iou_max; });
            if (it == kept.end()) {
                kept.push_back(std::move(r));
            } else {
                *it = merge_regions(*it, r);
                changed = true;
            }
        }
        regions = std::move(kept);
    }
    return regions;
}

/// True when some mask pixel lies within `radius` (Euclidean) of (u, v),
/// i.e. (u, v) is inside the mask dilated by a disk.
inline bool dilated_contains(const Region& region, double u, double v, double radius) {
    const Rect& b = region.bbox;
    const double dx = std::max({b.x - u, 0.0, u - (b.x1() - 1)});
    const double dy = std::max({b.y - v, 0.0, v - (b.y1() - 1)});
    if (dx * dx + dy * dy > radius * radius) return false;
    const int y0 = std::max(b.y, static_cast<int>(std::floor(v - radius)));
    const int y1 = std::min(b.y1() - 1, static_cast<int>(std::ceil(v + radius)));
    const int x0 = std::max(b.x, static_cast<int>(std::floor(u - radius)));
    const int x1 = std::min(b.x1() - 1, static_cast<int>(std::ceil(u + radius)));
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (region.mask(x - b.x, y - b.y) && (x - u) * (x - u) + (y - v) * (y - v) <= r2) return true;
    return false;
}

/// Region whose mask, dilated by `radius`, covers the speckle centre. Ties go
/// to the larger area, then the lower id.
inline std::optional<std::size_t> region_for_speckle(const std::vector<Region>& regions,
                                                     const ConfirmedSpeckle& speckle, double radius) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (!dilated_contains(regions[i], speckle.u, speckle.v, radius)) continue;
        if (!best || regions[i].area > regions[*best].area ||
            (regions[i].area == regions[*best].area && regions[i].id < regions[*best].id))
            best = i;
    }
    return best;
}

}  // namespace specklemap
