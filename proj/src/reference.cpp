#include "spect/reference.hpp"

#include <algorithm>
#include <cmath>

namespace spect::ref {

double chord_length(const ScanGeometry& g, int angle, int bin, int ix, int iy) {
    double theta = g.angle(angle);
    double c = std::cos(theta), s = std::sin(theta);
    double t = g.bin_center(bin);
    double px = t * c, py = t * s;
    double dx = -s, dy = c;

    double x0 = -0.5 * g.n;
    double ax = x0 + ix, bx = ax + 1.0;
    double ay = x0 + iy, by = ay + 1.0;

    // Half-open boxes so a boundary-parallel ray belongs to exactly one pixel,
    // matching the traced projector's floor convention.
    double smin = -1e300, smax = 1e300;
    if (std::abs(dx) > 1e-12) {
        double s1 = (ax - px) / dx, s2 = (bx - px) / dx;
        smin = std::max(smin, std::min(s1, s2));
        smax = std::min(smax, std::max(s1, s2));
    } else if (px < ax || px >= bx) {
        return 0.0;
    }
    if (std::abs(dy) > 1e-12) {
        double s1 = (ay - py) / dy, s2 = (by - py) / dy;
        smin = std::max(smin, std::min(s1, s2));
        smax = std::min(smax, std::max(s1, s2));
    } else if (py < ay || py >= by) {
        return 0.0;
    }
    return std::max(0.0, smax - smin);
}

Sinogram forward_project(const ScanGeometry& g, const Image& img) {
    Sinogram out(g.np, g.nr);
    for (int a = 0; a < g.np; ++a)
        for (int b = 0; b < g.nr; ++b) {
            double acc = 0.0;
            for (int iy = 0; iy < g.n; ++iy)
                for (int ix = 0; ix < g.n; ++ix)
                    acc += chord_length(g, a, b, ix, iy) * img.at(iy, ix);
            out.at(a, b) = acc;
        }
    return out;
}

Image back_project(const ScanGeometry& g, const Sinogram& sino) {
    Image out(g.n);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            double acc = 0.0;
            for (int a = 0; a < g.np; ++a)
                for (int b = 0; b < g.nr; ++b)
                    acc += chord_length(g, a, b, ix, iy) * sino.at(a, b);
            out.at(iy, ix) = acc;
        }
    return out;
}

std::vector<double> conv2d_forward(const std::vector<double>& in, int b, int c_in, int h, int w,
                                   const std::vector<double>& weights, int c_out, int k, int stride,
                                   const std::vector<double>& bias) {
    int p = k / 2;
    int oh = (h + 2 * p - k) / stride + 1;
    int ow = (w + 2 * p - k) / stride + 1;
    std::vector<double> out(static_cast<size_t>(b) * c_out * oh * ow, 0.0);
    for (int bb = 0; bb < b; ++bb)
        for (int o = 0; o < c_out; ++o)
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = bias[static_cast<size_t>(o)];
                    for (int c = 0; c < c_in; ++c)
                        for (int dy = 0; dy < k; ++dy)
                            for (int dxk = 0; dxk < k; ++dxk) {
                                int iy = oy * stride + dy - p;
                                int ix = ox * stride + dxk - p;
                                if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
                                acc += weights[((static_cast<size_t>(o) * c_in + c) * k + dy) * k + dxk] *
                                       in[((static_cast<size_t>(bb) * c_in + c) * h + iy) * w + ix];
                            }
                    out[((static_cast<size_t>(bb) * c_out + o) * oh + oy) * ow + ox] = acc;
                }
    return out;
}

std::vector<double> dense_forward(const std::vector<double>& in, int b, int d_in,
                                  const std::vector<double>& weights, int d_out,
                                  const std::vector<double>& bias) {
    std::vector<double> out(static_cast<size_t>(b) * d_out, 0.0);
    for (int bb = 0; bb < b; ++bb)
        for (int o = 0; o < d_out; ++o) {
            double acc = bias[static_cast<size_t>(o)];
            for (int i = 0; i < d_in; ++i)
                acc += weights[static_cast<size_t>(o) * d_in + i] *
                       in[static_cast<size_t>(bb) * d_in + i];
            out[static_cast<size_t>(bb) * d_out + o] = acc;
        }
    return out;
}

}  // namespace spect::ref
