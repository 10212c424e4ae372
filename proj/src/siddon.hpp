#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "spect/types.hpp"

// Grid traversal for one parallel-beam ray. The grid occupies
// [-n/2, n/2]^2 with unit pixels; pixel (ix, iy) covers
// [x0+ix, x0+ix+1) x [y0+iy, y0+iy+1), x0 = y0 = -n/2. A ray is
// parameterized by arc length s, so parametric deltas are chord lengths.

namespace spect::detail {

struct Ray {
    double px, py;  // point on the ray (bin center projected onto the detector axis)
    double dx, dy;  // unit direction
};

inline Ray bin_ray(const ScanGeometry& g, int angle_idx, int bin_idx) {
    double theta = g.angle(angle_idx);
    double c = std::cos(theta), s = std::sin(theta);
    double t = g.bin_center(bin_idx);
    return Ray{t * c, t * s, -s, c};
}

// Visits every pixel the ray crosses, in traversal order, as
// visit(pixel_index, chord_length). Boundary-parallel rays land in the pixel
// on the positive side of the boundary (floor convention).
template <typename F>
inline void trace_ray(int n, const Ray& ray, F&& visit) {
    const double x0 = -0.5 * n;
    const double big = std::numeric_limits<double>::max();

    // Clip the ray against the grid square.
    double smin = -big, smax = big;
    if (std::abs(ray.dx) > 1e-12) {
        double s1 = (x0 - ray.px) / ray.dx;
        double s2 = (x0 + n - ray.px) / ray.dx;
        smin = std::max(smin, std::min(s1, s2));
        smax = std::min(smax, std::max(s1, s2));
    } else if (ray.px < x0 || ray.px >= x0 + n) {
        return;
    }
    if (std::abs(ray.dy) > 1e-12) {
        double s1 = (x0 - ray.py) / ray.dy;
        double s2 = (x0 + n - ray.py) / ray.dy;
        smin = std::max(smin, std::min(s1, s2));
        smax = std::min(smax, std::max(s1, s2));
    } else if (ray.py < x0 || ray.py >= x0 + n) {
        return;
    }
    if (smin >= smax) return;

    double s = smin;
    double x = ray.px + s * ray.dx;
    double y = ray.py + s * ray.dy;
    int ix = std::clamp(static_cast<int>(std::floor(x - x0)), 0, n - 1);
    int iy = std::clamp(static_cast<int>(std::floor(y - x0)), 0, n - 1);

    const int step_x = ray.dx > 0 ? 1 : -1;
    const int step_y = ray.dy > 0 ? 1 : -1;
    // Arc length to the next x / y pixel boundary.
    auto next_cross_x = [&](int i) {
        if (std::abs(ray.dx) <= 1e-12) return big;
        double boundary = x0 + i + (ray.dx > 0 ? 1 : 0);
        return (boundary - ray.px) / ray.dx;
    };
    auto next_cross_y = [&](int i) {
        if (std::abs(ray.dy) <= 1e-12) return big;
        double boundary = x0 + i + (ray.dy > 0 ? 1 : 0);
        return (boundary - ray.py) / ray.dy;
    };
    double sx = next_cross_x(ix);
    double sy = next_cross_y(iy);

    while (s < smax) {
        double s_exit = std::min(std::min(sx, sy), smax);
        double len = s_exit - s;
        if (len > 0.0) visit(iy * n + ix, len);
        if (s_exit >= smax) break;
        if (sx <= sy) {
            ix += step_x;
            if (ix < 0 || ix >= n) break;
            sx = next_cross_x(ix);
        } else {
            iy += step_y;
            if (iy < 0 || iy >= n) break;
            sy = next_cross_y(iy);
        }
        s = s_exit;
    }
}

}  // namespace spect::detail
