#pragma once

// Candidate validation: sonar gating, patch binarisation and circularity,
// and the summed-area-table emptiness test around a speckle.

#include "specklemap/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace specklemap {

/// Invalidates every pixel farther than sonar.range + margin.
inline DepthFrame sonar_gate(DepthFrame frame, const SonarReading& sonar, double margin) {
    if (!(margin >= 0.0)) throw ParameterError("sonar margin must be >= 0");
    const double limit = sonar.range + margin;
    for (double& d : frame.depth.data())
        if (d > limit) d = kInvalidDepth;
    return frame;
}

// ---------------------------------------------------------------------------
// Binarisation

/// Two-class threshold maximising between-class variance over a `bins`-bin
/// histogram spanning [min, max] of `values`. Returns the upper edge of the
/// last bin of the lower class, or nullopt for fewer than two distinct values.
inline std::optional<double> otsu_threshold(std::span<const double> values, int bins = 64) {
    if (values.empty() || bins < 2) return std::nullopt;
    const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) return std::nullopt;

    const double width = (mx - mn) / bins;
    std::vector<double> hist(bins, 0.0);
    for (double x : values) {
        int b = static_cast<int>((x - mn) / width);
        hist[std::clamp(b, 0, bins - 1)] += 1.0;
    }
    const double total = static_cast<double>(values.size());
    double sum_all = 0.0;
    for (int i = 0; i < bins; ++i) sum_all += i * hist[i];

    double w0 = 0.0, sum0 = 0.0, best = -1.0;
    int best_k = 0;
    for (int k = 0; k < bins - 1; ++k) {
        w0 += hist[k];
        sum0 += k * hist[k];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
        const double between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if (between > best) {
            best = between;
            best_k = k;
        }
    }
    return mn + (best_k + 1) * width;
}

struct BinarizeOptions {
    int bins = 64;
    // Class means closer than this are treated as one surface (sensor noise, not two objects).
    double min_class_separation = 0.1;
};

/// Foreground = valid pixels in the nearer Otsu class. Degenerates to "all
/// valid pixels" when the patch has one distinct depth or the two classes are
/// not separated by at least min_class_separation metres.
inline Mask binarize_patch(const Grid<double>& patch, const BinarizeOptions& opts = {}) {
    if (patch.empty()) throw ParameterError("binarize_patch: empty patch");
    std::vector<double> valid;
    valid.reserve(patch.size());
    for (double d : patch.data())
        if (d > 0.0) valid.push_back(d);

    Mask out(patch.width(), patch.height(), 0);
    double cut = std::numeric_limits<double>::infinity();
    if (auto t = otsu_threshold(valid, opts.bins)) {
        double s0 = 0.0, s1 = 0.0;
        std::size_t n0 = 0, n1 = 0;
        for (double d : valid) {
            if (d <= *t) {
                s0 += d;
                ++n0;
            } else {
                s1 += d;
                ++n1;
            }
        }
        if (n0 && n1 && (s1 / n1 - s0 / n0) >= opts.min_class_separation) cut = *t;
    }
    for (std::size_t i = 0; i < patch.size(); ++i) {
        const double d = patch.data()[i];
        out.data()[i] = (d > 0.0 && d <= cut) ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Connected components and contours

namespace detail {

inline constexpr std::array<int, 8> kDirU{1, 1, 0, -1, -1, -1, 0, 1};  // E SE S SW W NW N NE
inline constexpr std::array<int, 8> kDirV{0, 1, 1, 1, 0, -1, -1, -1};

inline int direction_of(int du, int dv) {
    for (int d = 0; d < 8; ++d)
        if (kDirU[d] == du && kDirV[d] == dv) return d;
    return -1;
}

}  // namespace detail

/// Label image of 8-connected foreground components (labels from 1, raster
/// order of first pixel). Returns the pixel count per label (index 0 unused).
inline std::vector<long long> label_components(const Mask& binary, Grid<int>& labels) {
    labels = Grid<int>(binary.width(), binary.height(), 0);
    std::vector<long long> sizes{0};
    std::vector<std::pair<int, int>> stack;
    for (int v = 0; v < binary.height(); ++v)
        for (int u = 0; u < binary.width(); ++u) {
            if (!binary(u, v) || labels(u, v)) continue;
            const int label = static_cast<int>(sizes.size());
            long long count = 0;
            stack.clear();
            stack.emplace_back(u, v);
            labels(u, v) = label;
            while (!stack.empty()) {
                auto [pu, pv] = stack.back();
                stack.pop_back();
                ++count;
                for (int d = 0; d < 8; ++d) {
                    const int nu = pu + detail::kDirU[d], nv = pv + detail::kDirV[d];
                    if (binary.contains(nu, nv) && binary(nu, nv) && !labels(nu, nv)) {
                        labels(nu, nv) = label;
                        stack.emplace_back(nu, nv);
                    }
                }
            }
            sizes.push_back(count);
        }
    return sizes;
}

/// Outer boundary of the component containing `start`, which must be its
/// first pixel in raster order. Moore-neighbour tracing, clockwise; stops when
/// the start pixel is about to repeat its first outgoing move.
template <typename InSet>
std::vector<std::pair<int, int>> trace_outer_contour(int start_u, int start_v, InSet in_set) {
    std::vector<std::pair<int, int>> contour{{start_u, start_v}};
    int pu = start_u, pv = start_v;
    int back = 4;  // west neighbour of the first raster pixel is background
    int first_move = -1;
    const std::size_t limit = std::size_t{1} << 26;

    while (contour.size() < limit) {
        int found = -1;
        for (int k = 1; k <= 8; ++k) {
            const int d = (back + k) % 8;
            if (in_set(pu + detail::kDirU[d], pv + detail::kDirV[d])) {
                found = d;
                break;
            }
        }
        if (found < 0) break;  // isolated pixel

        const bool at_start = pu == start_u && pv == start_v;
        if (at_start && first_move >= 0 && found == first_move) break;
        if (first_move < 0) first_move = found;

        // Last background neighbour examined becomes the new backtrack point.
        const int prev = (found + 7) % 8;
        const int bu = pu + detail::kDirU[prev], bv = pv + detail::kDirV[prev];
        pu += detail::kDirU[found];
        pv += detail::kDirV[found];
        back = detail::direction_of(bu - pu, bv - pv);

        contour.emplace_back(pu, pv);
    }
    // Closing move back to the start is implicit.
    if (contour.size() > 1 && contour.back() == contour.front()) contour.pop_back();
    return contour;
}

/// Closed length of a traced contour with diagonal steps weighted sqrt(2).
inline double contour_length(const std::vector<std::pair<int, int>>& contour) {
    if (contour.size() < 2) return 0.0;
    double len = 0.0;
    for (std::size_t i = 0; i < contour.size(); ++i) {
        const auto& a = contour[i];
        const auto& b = contour[(i + 1) % contour.size()];
        const bool diagonal = a.first != b.first && a.second != b.second;
        len += diagonal ? std::numbers::sqrt2 : 1.0;
    }
    return len;
}

struct CircularityResult {
    double c = 0.0;
    double area = 0.0;
    double perimeter = 0.0;
    bool pass = false;
    Rect bbox;  // of the measured component, in binary-grid coordinates
};

/// 4*pi*area / perimeter^2 of the largest 8-connected foreground component.
/// Area is the pixel count; a single-pixel component has zero perimeter and
/// scores 0.
inline CircularityResult circularity(const Mask& binary, double threshold) {
    Grid<int> labels;
    const auto sizes = label_components(binary, labels);
    if (sizes.size() <= 1) throw ValidationError("circularity: no foreground pixels");

    int best = 1;
    for (int i = 2; i < static_cast<int>(sizes.size()); ++i)
        if (sizes[i] > sizes[best]) best = i;

    int su = -1, sv = -1;
    int x0 = binary.width(), y0 = binary.height(), x1 = -1, y1 = -1;
    for (int v = 0; v < binary.height(); ++v)
        for (int u = 0; u < binary.width(); ++u)
            if (labels(u, v) == best) {
                if (su < 0) {
                    su = u;
                    sv = v;
                }
                x0 = std::min(x0, u);
                x1 = std::max(x1, u);
                y0 = std::min(y0, v);
                y1 = std::max(y1, v);
            }

    auto in_set = [&](int u, int v) { return labels.contains(u, v) && labels(u, v) == best; };
    const auto contour = trace_outer_contour(su, sv, in_set);

    CircularityResult r;
    r.area = static_cast<double>(sizes[best]);
    r.perimeter = contour_length(contour);
    r.c = r.perimeter > 0.0 ? 4.0 * std::numbers::pi * r.area / (r.perimeter * r.perimeter) : 0.0;
    r.pass = r.c >= threshold;
    r.bbox = Rect::from_corners(x0, y0, x1 + 1, y1 + 1);
    return r;
}

// ---------------------------------------------------------------------------
// Integral image

/// (w+1) x (h+1) summed-area table with a zero first row and column.
class IntegralImage {
public:
    IntegralImage() = default;

    template <typename T>
    explicit IntegralImage(const Grid<T>& image)
        : width_(image.width()), height_(image.height()), table_(image.width() + 1, image.height() + 1, 0) {
        for (int v = 0; v < height_; ++v) {
            long long row_sum = 0;
            const T* src = image.row(v);
            const long long* above = table_.row(v);
            long long* dst = table_.row(v + 1);
            for (int u = 0; u < width_; ++u) {
                row_sum += static_cast<long long>(src[u]);
                dst[u + 1] = above[u + 1] + row_sum;
            }
        }
    }

    int width() const { return width_; }
    int height() const { return height_; }
    long long at(int x, int y) const { return table_(x, y); }
    const Grid<long long>& table() const { return table_; }

private:
    int width_ = 0;
    int height_ = 0;
    Grid<long long> table_;
};

template <typename T>
IntegralImage integral_image(const Grid<T>& binary) {
    return IntegralImage(binary);
}

/// Sum over rect after clipping to the image; 0 when the clipped rect is empty.
inline long long box_sum(const IntegralImage& ii, const Rect& rect) {
    const Rect r = intersect(rect, Rect{0, 0, ii.width(), ii.height()});
    if (r.empty()) return 0;
    return ii.at(r.x1(), r.y1()) - ii.at(r.x, r.y1()) - ii.at(r.x1(), r.y) + ii.at(r.x, r.y);
}

/// The eight band-thick rectangles around bbox (N, NE, E, SE, S, SW, W, NW),
/// tiling the ring without overlap. Not clipped.
inline std::array<Rect, 8> surround_regions(const Rect& bbox, int band) {
    const int xs[4] = {bbox.x - band, bbox.x, bbox.x1(), bbox.x1() + band};
    const int ys[4] = {bbox.y - band, bbox.y, bbox.y1(), bbox.y1() + band};
    auto cell = [&](int i, int j) { return Rect::from_corners(xs[i], ys[j], xs[i + 1], ys[j + 1]); };
    return {cell(1, 0), cell(2, 0), cell(2, 1), cell(2, 2), cell(1, 2), cell(0, 2), cell(0, 1), cell(0, 0)};
}

struct SurroundResult {
    bool empty = true;
    std::array<double, 8> ratios{};     // filled fraction per region; -1 when clipped away
    double max_ratio = 0.0;
};

inline SurroundResult measure_surround(const IntegralImage& ii, const Rect& bbox, double ratio_max, int band) {
    if (band < 1) throw ParameterError("surround band must be >= 1");
    const Rect image{0, 0, ii.width(), ii.height()};
    SurroundResult res;
    const auto regions = surround_regions(bbox, band);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const Rect clipped = intersect(regions[i], image);
        if (clipped.empty()) {
            res.ratios[i] = -1.0;
            continue;
        }
        const double ratio = static_cast<double>(box_sum(ii, clipped)) / static_cast<double>(clipped.area());
        res.ratios[i] = ratio;
        res.max_ratio = std::max(res.max_ratio, ratio);
        if (!(ratio < ratio_max)) res.empty = false;
    }
    return res;
}

/// True iff every (clipped, non-empty) surround region has filled ratio < ratio_max.
inline bool verify_empty_surround(const IntegralImage& ii, const Rect& bbox, double ratio_max, int band) {
    return measure_surround(ii, bbox, ratio_max, band).empty;
}

}  // namespace specklemap
