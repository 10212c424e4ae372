#include "spect/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "spect/rng.hpp"

namespace spect {

namespace {

struct Shape {
    int kind;  // 0 ellipse, 1 rectangle, 2 gaussian blob
    double cx, cy;
    double ax, ay;  // half-extents
    double rot;
    double intensity;
};

double shape_value(const Shape& s, double x, double y) {
    double dx = x - s.cx, dy = y - s.cy;
    double c = std::cos(s.rot), sn = std::sin(s.rot);
    double xr = dx * c + dy * sn;
    double yr = -dx * sn + dy * c;
    switch (s.kind) {
        case 0: {
            double q = (xr / s.ax) * (xr / s.ax) + (yr / s.ay) * (yr / s.ay);
            return q <= 1.0 ? s.intensity : 0.0;
        }
        case 1:
            return (std::abs(xr) <= s.ax && std::abs(yr) <= s.ay) ? s.intensity : 0.0;
        default: {
            // sigma = half-extent / 2 keeps ~95% of the blob inside the extents
            double sx = s.ax * 0.5, sy = s.ay * 0.5;
            double q = (xr * xr) / (2.0 * sx * sx) + (yr * yr) / (2.0 * sy * sy);
            return s.intensity * std::exp(-q);
        }
    }
}

}  // namespace

Image random_phantom(const PhantomSpec& spec, uint64_t seed) {
    if (spec.n < 1) throw DataError("random_phantom: n must be >= 1");
    if (spec.shape_count_min < 0 || spec.shape_count_max < spec.shape_count_min)
        throw DataError("random_phantom: bad shape_count range");

    Pcg32 rng(seed);
    int count = spec.shape_count_min +
                static_cast<int>(rng.bounded(
                    static_cast<uint32_t>(spec.shape_count_max - spec.shape_count_min + 1)));
    double fov = 0.5 * spec.n;
    std::vector<Shape> shapes(static_cast<size_t>(count));
    for (auto& s : shapes) {
        s.kind = static_cast<int>(rng.bounded(3));
        double r = fov * std::sqrt(rng.uniform());
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        s.cx = r * std::cos(phi);
        s.cy = r * std::sin(phi);
        s.ax = rng.uniform(spec.n / 16.0, spec.n / 3.0);
        s.ay = rng.uniform(spec.n / 16.0, spec.n / 3.0);
        s.rot = rng.uniform(0.0, M_PI);
        s.intensity = rng.uniform(0.2, 1.0);
    }

    Image img(spec.n);
    double half = (spec.n - 1) / 2.0;
    for (int iy = 0; iy < spec.n; ++iy)
        for (int ix = 0; ix < spec.n; ++ix) {
            double x = ix - half, y = iy - half;
            if (x * x + y * y > fov * fov) continue;  // outside inscribed circle
            double v = 0.0;
            for (const auto& s : shapes) v += shape_value(s, x, y);
            img.at(iy, ix) = std::clamp(v, 0.0, 1.0);
        }
    return img;
}

namespace {

// Classic head phantom: intensity, half-axes, center, rotation (degrees).
struct Ellipse {
    double a_val, ha, hb, x0, y0, phi_deg;
};

constexpr Ellipse kHeadEllipses[10] = {
    {1.00, 0.6900, 0.9200, 0.00, 0.0000, 0.0},
    {-0.98, 0.6624, 0.8740, 0.00, -0.0184, 0.0},
    {-0.02, 0.1100, 0.3100, 0.22, 0.0000, -18.0},
    {-0.02, 0.1600, 0.4100, -0.22, 0.0000, 18.0},
    {0.01, 0.2100, 0.2500, 0.00, 0.3500, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, 0.1000, 0.0},
    {0.01, 0.0460, 0.0460, 0.00, -0.1000, 0.0},
    {0.01, 0.0460, 0.0230, -0.08, -0.6050, 0.0},
    {0.01, 0.0230, 0.0230, 0.00, -0.6060, 0.0},
    {0.01, 0.0230, 0.0460, 0.06, -0.6050, 0.0},
};

}  // namespace

Image shepp_logan(int n) {
    if (n < 32) throw DataError("shepp_logan: n must be >= 32");
    Image img(n);
    double half = (n - 1) / 2.0;
    double scale = 2.0 / n;  // pixel centers mapped into (-1, 1)
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            double x = (ix - half) * scale;
            double y = (iy - half) * scale;
            double v = 0.0;
            for (const auto& e : kHeadEllipses) {
                double phi = e.phi_deg * M_PI / 180.0;
                double c = std::cos(phi), s = std::sin(phi);
                double dx = x - e.x0, dy = y - e.y0;
                double xr = dx * c + dy * s;
                double yr = -dx * s + dy * c;
                if ((xr / e.ha) * (xr / e.ha) + (yr / e.hb) * (yr / e.hb) <= 1.0) v += e.a_val;
            }
            img.at(iy, ix) = std::max(v, 0.0);
        }
    return img;
}

}  // namespace spect
