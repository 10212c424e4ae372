#include "spect/ssim.hpp"

#include <cmath>

namespace spect {

namespace {

struct Stats {
    double mx, my, vx, vy, cov;
};

Stats moments(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double vx = 0.0, vy = 0.0, cov = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x[i] - mx, dy = y[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    return {mx, my, vx / n, vy / n, cov / n};
}

void check_pair(std::span<const double> x, std::span<const double> y, const char* who) {
    if (x.empty()) throw DataError(std::string(who) + ": empty input");
    if (x.size() != y.size()) throw DataError(std::string(who) + ": size mismatch");
}

}  // namespace

double ssim(std::span<const double> x, std::span<const double> y, const SsimParams& p) {
    check_pair(x, y, "ssim");
    Stats st = moments(x, y);
    double a1 = 2.0 * st.mx * st.my + p.c1();
    double a2 = 2.0 * st.cov + p.c2();
    double b1 = st.mx * st.mx + st.my * st.my + p.c1();
    double b2 = st.vx + st.vy + p.c2();
    return (a1 * a2) / (b1 * b2);
}

std::vector<double> ssim_loss_grad(std::span<const double> x, std::span<const double> y,
                                   const SsimParams& p) {
    check_pair(x, y, "ssim_loss_grad");
    const size_t n = x.size();
    Stats st = moments(x, y);
    double a1 = 2.0 * st.mx * st.my + p.c1();
    double a2 = 2.0 * st.cov + p.c2();
    double b1 = st.mx * st.mx + st.my * st.my + p.c1();
    double b2 = st.vx + st.vy + p.c2();
    double s = (a1 * a2) / (b1 * b2);
    // dS/dx_i = 2/(N b1 b2) * [ a2 my + a1 (y_i - my) - s (b2 mx + b1 (x_i - mx)) ]
    double pref = 2.0 / (static_cast<double>(n) * b1 * b2);
    std::vector<double> g(n);
    for (size_t i = 0; i < n; ++i) {
        double ds = pref * (a2 * st.my + a1 * (y[i] - st.my) -
                            s * (b2 * st.mx + b1 * (x[i] - st.mx)));
        g[i] = -ds;  // gradient of 1 - SSIM
    }
    return g;
}

double ssim_windowed(const Image& x, const Image& y, const SsimParams& p, int win, int stride) {
    if (x.n != y.n) throw DataError("ssim_windowed: size mismatch");
    const int n = x.n;
    if (n < win) return ssim(x.data, y.data, p);
    std::vector<double> wx(static_cast<size_t>(win) * win), wy(wx.size());
    double acc = 0.0;
    int count = 0;
    for (int oy = 0; oy + win <= n; oy += stride)
        for (int ox = 0; ox + win <= n; ox += stride) {
            for (int dy = 0; dy < win; ++dy)
                for (int dx = 0; dx < win; ++dx) {
                    wx[static_cast<size_t>(dy) * win + dx] = x.at(oy + dy, ox + dx);
                    wy[static_cast<size_t>(dy) * win + dx] = y.at(oy + dy, ox + dx);
                }
            acc += ssim(wx, wy, p);
            ++count;
        }
    return acc / count;
}

}  // namespace spect
