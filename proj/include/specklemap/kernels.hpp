#pragma once

// Bright-disk and dark-ring detection kernels, ROI correlation, peak
// extraction and bright/ring peak pairing.

#include "specklemap/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <tuple>
#include <vector>

namespace specklemap {

/// Horizontal span of equal, non-zero kernel weights: offsets dx in [x0, x1] on row dy.
struct KernelRun {
    int dy = 0;
    int x0 = 0;
    int x1 = 0;
    int weight_index = 0;
};

/// Square (2r+1)^2 correlation mask. Stored both densely and as run-length
/// spans so the response can be evaluated from row prefix sums.
class Kernel {
public:
    Kernel() = default;

    static Kernel from_weights(Grid<double> weights) {
        if (weights.width() != weights.height() || weights.width() % 2 == 0)
            throw ParameterError("kernel must be square with odd side");
        Kernel k;
        k.radius_ = weights.width() / 2;
        k.weights_ = std::move(weights);
        k.build_runs();
        return k;
    }

    int radius() const { return radius_; }
    const Grid<double>& weights() const { return weights_; }
    double weight(int dx, int dy) const {
        if (std::abs(dx) > radius_ || std::abs(dy) > radius_) return 0.0;
        return weights_(dx + radius_, dy + radius_);
    }
    double sum() const {
        double s = 0.0;
        for (double w : weights_.data()) s += w;
        return s;
    }
    std::size_t nonzero_count() const {
        return static_cast<std::size_t>(
            std::count_if(weights_.data().begin(), weights_.data().end(), [](double w) { return w != 0.0; }));
    }

    const std::vector<KernelRun>& runs() const { return runs_; }
    const std::vector<double>& run_weights() const { return run_weights_; }

private:
    void build_runs() {
        runs_.clear();
        run_weights_.clear();
        const int n = weights_.width();
        for (int y = 0; y < n; ++y) {
            int x = 0;
            while (x < n) {
                const double w = weights_(x, y);
                if (w == 0.0) {
                    ++x;
                    continue;
                }
                int end = x;
                while (end + 1 < n && weights_(end + 1, y) == w) ++end;
                auto it = std::find(run_weights_.begin(), run_weights_.end(), w);
                const int idx = static_cast<int>(it - run_weights_.begin());
                if (it == run_weights_.end()) run_weights_.push_back(w);
                runs_.push_back({y - radius_, x - radius_, end - radius_, idx});
                x = end + 1;
            }
        }
    }

    int radius_ = 0;
    Grid<double> weights_;
    std::vector<KernelRun> runs_;
    std::vector<double> run_weights_;
};

namespace detail {

template <typename Indicator>
Kernel indicator_kernel(int radius, Indicator inside) {
    const int n = 2 * radius + 1;
    Grid<double> w(n, n, 0.0);
    long long count = 0;
    for (int y = -radius; y <= radius; ++y)
        for (int x = -radius; x <= radius; ++x)
            if (inside(x * x + y * y)) ++count;
    const double value = 1.0 / static_cast<double>(count);
    for (int y = -radius; y <= radius; ++y)
        for (int x = -radius; x <= radius; ++x)
            if (inside(x * x + y * y)) w(x + radius, y + radius) = value;
    return Kernel::from_weights(std::move(w));
}

}  // namespace detail

/// Uniform disk of radius r_b, unit sum.
inline Kernel build_bright_kernel(int r_b) {
    if (r_b < 1) throw ParameterError("bright kernel radius must be >= 1");
    const long long r2 = static_cast<long long>(r_b) * r_b;
    return detail::indicator_kernel(r_b, [r2](long long d2) { return d2 <= r2; });
}

/// Uniform annulus r_in < |p| <= r_out, unit sum.
inline Kernel build_dark_ring_kernel(int r_in, int r_out) {
    if (r_in < 1) throw ParameterError("ring inner radius must be >= 1");
    if (r_in >= r_out) throw ParameterError("ring inner radius must be smaller than the outer radius");
    const long long in2 = static_cast<long long>(r_in) * r_in;
    const long long out2 = static_cast<long long>(r_out) * r_out;
    return detail::indicator_kernel(r_out, [in2, out2](long long d2) { return d2 > in2 && d2 <= out2; });
}

struct ResponseMap {
    Grid<double> scores;  // full frame size; zero outside roi
    Rect roi;
};

/// Centered rectangle covering `fraction` of each image dimension.
inline Rect centered_roi(int width, int height, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("roi fraction must be in (0, 1]");
    const int w = std::max(1, static_cast<int>(std::lround(width * fraction)));
    const int h = std::max(1, static_cast<int>(std::lround(height * fraction)));
    return {(width - w) / 2, (height - h) / 2, w, h};
}

/// response(p) = sum_o kernel(o) * image(p + o) over the roi; samples outside
/// the image count as 0.
inline ResponseMap convolve_roi(const Grid<double>& image, const Kernel& kernel, const Rect& roi) {
    const Rect full{0, 0, image.width(), image.height()};
    if (roi.empty() || !full.contains(roi)) throw BoundsError("convolve_roi: roi outside the image");

    const int W = image.width();
    const int H = image.height();
    const int r = kernel.radius();
    const int row0 = std::max(0, roi.y - r);
    const int row1 = std::min(H, roi.y1() + r);

    // prefix[(row - row0) * (W + 1) + x] = sum of image(0..x-1, row)
    std::vector<double> prefix(static_cast<std::size_t>(row1 - row0) * (W + 1), 0.0);
    for (int v = row0; v < row1; ++v) {
        double* p = prefix.data() + static_cast<std::size_t>(v - row0) * (W + 1);
        const double* src = image.row(v);
        double acc = 0.0;
        for (int u = 0; u < W; ++u) {
            acc += src[u];
            p[u + 1] = acc;
        }
    }

    ResponseMap out{Grid<double>(W, H, 0.0), roi};
    const auto& runs = kernel.runs();
    const auto& weights = kernel.run_weights();
    const int RW = roi.width;
    // One accumulator row per distinct weight; runs are applied in kernel order
    // so each pixel sees the same summation sequence.
    std::vector<double> acc(weights.size() * static_cast<std::size_t>(RW));

    for (int v = roi.y; v < roi.y1(); ++v) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (const KernelRun& run : runs) {
            const int row = v + run.dy;
            if (row < 0 || row >= H) continue;
            const double* p = prefix.data() + static_cast<std::size_t>(row - row0) * (W + 1);
            double* a_row = acc.data() + static_cast<std::size_t>(run.weight_index) * RW;
            // u range where the run lies fully inside [0, W)
            const int lo = std::clamp(-run.x0, roi.x, roi.x1());
            const int hi = std::clamp(W - 1 - run.x1 + 1, lo, roi.x1());
            for (int u = roi.x; u < lo; ++u) {
                const int a = std::clamp(u + run.x0, 0, W);
                const int b = std::clamp(u + run.x1 + 1, 0, W);
                if (b > a) a_row[u - roi.x] += p[b] - p[a];
            }
            const double* pa = p + run.x0;
            const double* pb = p + run.x1 + 1;
            for (int u = lo; u < hi; ++u) a_row[u - roi.x] += pb[u] - pa[u];
            for (int u = hi; u < roi.x1(); ++u) {
                const int a = std::clamp(u + run.x0, 0, W);
                const int b = std::clamp(u + run.x1 + 1, 0, W);
                if (b > a) a_row[u - roi.x] += p[b] - p[a];
            }
        }
        // Summing per distinct weight keeps binary inputs exact, so equal
        // footprints give bitwise-equal scores.
        double* o = out.scores.row(v) + roi.x;
        for (int x = 0; x < RW; ++x) o[x] = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double* a_row = acc.data() + i * RW;
            for (int x = 0; x < RW; ++x) o[x] += weights[i] * a_row[x];
        }
    }
    return out;
}

struct Peak {
    int u = 0;
    int v = 0;
    double score = 0.0;

    bool operator==(const Peak&) const = default;
};

/// Regional maxima of the response inside its roi whose score lies in [lo, hi].
///
/// A maximum is a connected plateau of equal score whose 8-neighbours (inside
/// the roi) are all strictly lower, with at least one such neighbour. A
/// single-pixel plateau is an ordinary strict maximum; a wider plateau yields
/// one peak at the plateau pixel closest to its centroid. Sorted by descending
/// score, then raster order.
inline std::vector<Peak> detect_peaks(const ResponseMap& map, double lo, double hi) {
    if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) throw ParameterError("detect_peaks: need 0 <= lo < hi <= 1");
    const Rect& roi = map.roi;
    const auto& s = map.scores;
    std::vector<Peak> peaks;
    if (roi.empty()) return peaks;

    Mask visited(roi.width, roi.height, 0);
    std::vector<std::pair<int, int>> plateau;
    std::deque<std::pair<int, int>> queue;

    for (int v = roi.y; v < roi.y1(); ++v) {
        for (int u = roi.x; u < roi.x1(); ++u) {
            const double value = s(u, v);
            if (value < lo || value > hi || visited(u - roi.x, v - roi.y)) continue;

            bool higher = false;
            for (int dv = -1; dv <= 1 && !higher; ++dv)
                for (int du = -1; du <= 1; ++du) {
                    const int nu = u + du, nv = v + dv;
                    if ((du || dv) && roi.contains(nu, nv) && s(nu, nv) > value) {
                        higher = true;
                        break;
                    }
                }
            if (higher) continue;

            // Flood the equal-valued plateau.
            plateau.clear();
            queue.clear();
            queue.emplace_back(u, v);
            visited(u - roi.x, v - roi.y) = 1;
            bool is_max = true;
            bool has_lower = false;
            while (!queue.empty()) {
                auto [pu, pv] = queue.front();
                queue.pop_front();
                plateau.emplace_back(pu, pv);
                for (int dv = -1; dv <= 1; ++dv)
                    for (int du = -1; du <= 1; ++du) {
                        if (!du && !dv) continue;
                        const int nu = pu + du, nv = pv + dv;
                        if (!roi.contains(nu, nv)) continue;
                        const double nvalue = s(nu, nv);
                        if (nvalue > value) {
                            is_max = false;
                        } else if (nvalue < value) {
                            has_lower = true;
                        } else if (!visited(nu - roi.x, nv - roi.y)) {
                            visited(nu - roi.x, nv - roi.y) = 1;
                            queue.emplace_back(nu, nv);
                        }
                    }
            }
            if (!is_max || !has_lower) continue;

            double mu = 0.0, mv = 0.0;
            for (auto [pu, pv] : plateau) {
                mu += pu;
                mv += pv;
            }
            mu /= static_cast<double>(plateau.size());
            mv /= static_cast<double>(plateau.size());
            auto best = plateau.front();
            double best_d2 = std::numeric_limits<double>::infinity();
            for (auto [pu, pv] : plateau) {
                const double d2 = (pu - mu) * (pu - mu) + (pv - mv) * (pv - mv);
                if (d2 < best_d2 || (d2 == best_d2 && std::tie(pv, pu) < std::tie(best.second, best.first))) {
                    best_d2 = d2;
                    best = {pu, pv};
                }
            }
            peaks.push_back({best.first, best.second, value});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.score != b.score) return a.score > b.score;
        return std::tie(a.v, a.u) < std::tie(b.v, b.u);
    });
    return peaks;
}

struct SpeckleCandidate {
    Peak bright_peak;
    Peak ring_peak;
    int center_u = 0;
    int center_v = 0;
    double depth_m = 0.0;
    Grid<double> patch;  // raw depth crop; samples outside the frame are 0
    int patch_x = 0;     // frame coordinates of patch(0, 0)
    int patch_y = 0;

    double combined_score() const { return bright_peak.score + ring_peak.score; }
};

struct PairingOptions {
    int depth_radius = 11;  // median depth taken within this radius of the bright peak
    int patch_size = 64;
};

/// Median of valid depths within `radius` of (u, v); 0 when there are none.
inline double median_valid_depth(const DepthFrame& frame, int u, int v, int radius) {
    std::vector<double> values;
    const long long r2 = static_cast<long long>(radius) * radius;
    for (int dv = -radius; dv <= radius; ++dv)
        for (int du = -radius; du <= radius; ++du) {
            if (static_cast<long long>(du) * du + static_cast<long long>(dv) * dv > r2) continue;
            const int pu = u + du, pv = v + dv;
            if (frame.depth.contains(pu, pv) && frame.depth(pu, pv) > 0.0) values.push_back(frame.depth(pu, pv));
        }
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    return 0.5 * (lower + upper);
}

/// Square crop of the frame's depth centred on (u, v).
inline Grid<double> crop_patch(const DepthFrame& frame, int u, int v, int size, int& origin_x, int& origin_y) {
    origin_x = u - size / 2;
    origin_y = v - size / 2;
    Grid<double> patch(size, size, 0.0);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const int fu = origin_x + x, fv = origin_y + y;
            if (frame.depth.contains(fu, fv)) patch(x, y) = frame.depth(fu, fv);
        }
    return patch;
}

/// Greedy one-to-one matching of bright and ring peaks closer than max_dist,
/// taken in descending combined-score order. Pairs without any valid depth
/// near the bright peak are dropped.
inline std::vector<SpeckleCandidate> pair_peaks(const std::vector<Peak>& bright, const std::vector<Peak>& ring,
                                                double max_dist, const DepthFrame& frame,
                                                const PairingOptions& opts = {}) {
    struct Pair {
        double score;
        double dist2;
        std::size_t bi;
        std::size_t ri;
    };
    std::vector<Pair> pairs;
    const double max2 = max_dist * max_dist;

    // Bucket ring peaks on a max_dist grid so the pair search stays local.
    const double cell = std::max(1.0, max_dist);
    auto key = [cell](int u, int v) {
        return std::pair<long long, long long>{static_cast<long long>(std::floor(u / cell)),
                                               static_cast<long long>(std::floor(v / cell))};
    };
    std::vector<std::pair<std::pair<long long, long long>, std::size_t>> buckets;
    buckets.reserve(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) buckets.push_back({key(ring[i].u, ring[i].v), i});
    std::sort(buckets.begin(), buckets.end());

    for (std::size_t bi = 0; bi < bright.size(); ++bi) {
        const auto [kx, ky] = key(bright[bi].u, bright[bi].v);
        for (long long gy = ky - 1; gy <= ky + 1; ++gy)
            for (long long gx = kx - 1; gx <= kx + 1; ++gx) {
                auto lo = std::lower_bound(buckets.begin(), buckets.end(),
                                           std::pair{std::pair{gx, gy}, std::size_t{0}});
                for (auto it = lo; it != buckets.end() && it->first == std::pair{gx, gy}; ++it) {
                    const Peak& r = ring[it->second];
                    const double du = r.u - bright[bi].u, dv = r.v - bright[bi].v;
                    const double d2 = du * du + dv * dv;
                    if (d2 < max2) pairs.push_back({bright[bi].score + r.score, d2, bi, it->second});
                }
            }
    }

    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
        return std::tie(a.bi, a.ri) < std::tie(b.bi, b.ri);
    });

    std::vector<char> used_b(bright.size(), 0), used_r(ring.size(), 0);
    std::vector<SpeckleCandidate> out;
    for (const Pair& p : pairs) {
        if (used_b[p.bi] || used_r[p.ri]) continue;
        used_b[p.bi] = used_r[p.ri] = 1;
        const Peak& b = bright[p.bi];
        const double depth = median_valid_depth(frame, b.u, b.v, opts.depth_radius);
        if (!(depth > 0.0)) continue;
        SpeckleCandidate c;
        c.bright_peak = b;
        c.ring_peak = ring[p.ri];
        c.center_u = b.u;
        c.center_v = b.v;
        c.depth_m = depth;
        c.patch = crop_patch(frame, b.u, b.v, opts.patch_size, c.patch_x, c.patch_y);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace specklemap
