#include "spect/fbp.hpp"

#include <cmath>

namespace spect {

std::vector<double> ramp_kernel(int half_width, double bin_width) {
    if (half_width < 1) throw DataError("ramp_kernel: half_width must be >= 1");
    std::vector<double> h(static_cast<size_t>(2 * half_width + 1), 0.0);
    double w2 = bin_width * bin_width;
    h[static_cast<size_t>(half_width)] = 1.0 / (4.0 * w2);
    for (int k = 1; k <= half_width; k += 2) {
        double v = -1.0 / (M_PI * M_PI * k * k * w2);
        h[static_cast<size_t>(half_width + k)] = v;
        h[static_cast<size_t>(half_width - k)] = v;
    }
    return h;
}

Image fbp(const Sinogram& sino, const ScanGeometry& g, const FbpConfig& cfg) {
    g.validate();
    if (!sino.matches(g)) throw DataError("fbp: sinogram shape does not match geometry");
    const int n = g.n, np = g.np, nr = g.nr;

    const int hw = nr - 1;
    std::vector<double> h = ramp_kernel(hw, g.bin_width);
    if (cfg.filter == FbpConfig::Filter::Hann) {
        // Hann window in frequency space is the three-tap smoother
        // [1/4, 1/2, 1/4] applied to the ramp kernel.
        std::vector<double> hh(h.size());
        for (int i = 0; i < static_cast<int>(h.size()); ++i) {
            double acc = 0.5 * h[static_cast<size_t>(i)];
            if (i > 0) acc += 0.25 * h[static_cast<size_t>(i - 1)];
            if (i + 1 < static_cast<int>(h.size())) acc += 0.25 * h[static_cast<size_t>(i + 1)];
            hh[static_cast<size_t>(i)] = acc;
        }
        h.swap(hh);
    }

    // q = bin_width * (h conv p), per angle. The bin_width factor makes the
    // discrete convolution approximate the continuous ramp filtering.
    std::vector<double> filtered(sino.data.size(), 0.0);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < np; ++a) {
        const double* row = sino.data.data() + static_cast<size_t>(a) * nr;
        double* qrow = filtered.data() + static_cast<size_t>(a) * nr;
        for (int i = 0; i < nr; ++i) {
            double acc = 0.0;
            for (int k = 0; k < nr; ++k) acc += h[static_cast<size_t>(hw + i - k)] * row[k];
            qrow[i] = acc * g.bin_width;
        }
    }

    // Pixel-driven backprojection with linear interpolation over bins.
    std::vector<double> cs(static_cast<size_t>(np)), sn(static_cast<size_t>(np));
    for (int a = 0; a < np; ++a) {
        cs[static_cast<size_t>(a)] = std::cos(g.angle(a));
        sn[static_cast<size_t>(a)] = std::sin(g.angle(a));
    }
    Image out(n);
    const double half = (n - 1) / 2.0;
    const double scale = g.angle_span / (2.0 * np);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < n; ++iy) {
        double y = iy - half;
        for (int ix = 0; ix < n; ++ix) {
            double x = ix - half;
            double acc = 0.0;
            for (int a = 0; a < np; ++a) {
                double t = x * cs[static_cast<size_t>(a)] + y * sn[static_cast<size_t>(a)];
                double bpos = t / g.bin_width + (nr - 1) / 2.0;
                int b0 = static_cast<int>(std::floor(bpos));
                double w = bpos - b0;
                const double* qrow = filtered.data() + static_cast<size_t>(a) * nr;
                double v = 0.0;
                if (b0 >= 0 && b0 < nr) v += (1.0 - w) * qrow[b0];
                if (b0 + 1 >= 0 && b0 + 1 < nr) v += w * qrow[b0 + 1];
                acc += v;
            }
            out.at(iy, ix) = acc * scale;
        }
    }
    return out;
}

}  // namespace spect
