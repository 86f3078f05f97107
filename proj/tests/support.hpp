#pragma once

// Independent reference implementations the library is checked against, and
// small raster builders. Everything here is deliberately naive.

#include "specklemap/core.hpp"
#include "specklemap/kernels.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <random>
#include <utility>
#include <vector>

namespace testsupport {

using specklemap::Grid;
using specklemap::Mask;

inline Mask disk_mask(int w, int h, double cu, double cv, double r) {
    Mask m(w, h, 0);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if ((u - cu) * (u - cu) + (v - cv) * (v - cv) <= r * r) m(u, v) = 1;
    return m;
}

inline Mask rect_mask(int w, int h, int x0, int y0, int rw, int rh) {
    Mask m(w, h, 0);
    for (int v = y0; v < y0 + rh; ++v)
        for (int u = x0; u < x0 + rw; ++u)
            if (m.contains(u, v)) m(u, v) = 1;
    return m;
}

inline Mask random_mask(std::mt19937_64& rng, int w, int h, double p = 0.5) {
    std::bernoulli_distribution b(p);
    Mask m(w, h, 0);
    for (auto& x : m.data()) x = b(rng) ? 1 : 0;
    return m;
}

/// Direct correlation sum over the kernel footprint, out-of-image samples = 0.
inline double brute_correlation(const Grid<double>& img, const specklemap::Kernel& k, int u, int v) {
    double s = 0.0;
    const int r = k.radius();
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            const int x = u + dx, y = v + dy;
            if (!img.contains(x, y)) continue;
            s += k.weight(dx, dy) * img(x, y);
        }
    return s;
}

inline long long naive_sum(const Mask& m, int x0, int y0, int x1, int y1) {
    long long s = 0;
    for (int v = std::max(0, y0); v < std::min(m.height(), y1); ++v)
        for (int u = std::max(0, x0); u < std::min(m.width(), x1); ++u) s += m(u, v);
    return s;
}

/// Breadth-first 8-connected labelling; returns the component count and fills labels (0 = background).
inline int flood_fill_labels(const Mask& m, Grid<int>& labels) {
    labels = Grid<int>(m.width(), m.height(), 0);
    int n = 0;
    for (int v = 0; v < m.height(); ++v)
        for (int u = 0; u < m.width(); ++u) {
            if (!m(u, v) || labels(u, v)) continue;
            ++n;
            std::deque<std::pair<int, int>> q{{u, v}};
            labels(u, v) = n;
            while (!q.empty()) {
                auto [x, y] = q.front();
                q.pop_front();
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = x + dx, ny = y + dy;
                        if (m.contains(nx, ny) && m(nx, ny) && !labels(nx, ny)) {
                            labels(nx, ny) = n;
                            q.emplace_back(nx, ny);
                        }
                    }
            }
        }
    return n;
}

inline Grid<double> to_double(const Mask& m) {
    Grid<double> g(m.width(), m.height(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) g.data()[i] = m.data()[i];
    return g;
}

}  // namespace testsupport
