#include "spect/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace spect {

namespace {

void check_same_shape(const Image& x, const Image& y, const char* who) {
    if (x.n != y.n || x.data.size() != y.data.size())
        throw DataError(std::string(who) + ": shape mismatch");
    if (x.data.empty()) throw DataError(std::string(who) + ": empty image");
}

}  // namespace

Image normalize(const Image& img) {
    if (img.data.empty()) throw DataError("normalize: empty image");
    auto [lo_it, hi_it] = std::minmax_element(img.data.begin(), img.data.end());
    double lo = *lo_it, hi = *hi_it;
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw DataError("normalize: non-finite image");
    Image out(img.n);
    out.data = img.data;
    if (hi > lo) {
        double inv = 1.0 / (hi - lo);
        for (double& v : out.data) v = (v - lo) * inv;
    } else {
        std::fill(out.data.begin(), out.data.end(), 0.0);
    }
    return out;
}

double mse(const Image& x, const Image& y) {
    check_same_shape(x, y, "mse");
    double acc = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i) {
        double d = x.data[i] - y.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(x.data.size());
}

double mae(const Image& x, const Image& y) {
    check_same_shape(x, y, "mae");
    double acc = 0.0;
    for (size_t i = 0; i < x.data.size(); ++i) acc += std::abs(x.data[i] - y.data[i]);
    return acc / static_cast<double>(x.data.size());
}

double pcc(const Image& x, const Image& y, bool* degenerate) {
    check_same_shape(x, y, "pcc");
    const size_t n = x.data.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x.data[i];
        my += y.data[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double vx = 0.0, vy = 0.0, cov = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double dx = x.data[i] - mx, dy = y.data[i] - my;
        vx += dx * dx;
        vy += dy * dy;
        cov += dx * dy;
    }
    if (degenerate) *degenerate = false;
    if (vx <= 0.0 || vy <= 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return cov / std::sqrt(vx * vy);
}

MetricReport evaluate(const Image& reconstruction, const Image& truth, bool windowed_ssim) {
    check_same_shape(reconstruction, truth, "evaluate");
    Image rn = normalize(reconstruction);
    Image tn = normalize(truth);
    MetricReport r;
    r.mse = mse(rn, tn);
    r.mae = mae(rn, tn);
    SsimParams params;  // L = 1 for [0,1] images
    r.ssim = windowed_ssim ? ssim_windowed(rn, tn, params) : ssim(rn.data, tn.data, params);
    r.pcc = pcc(rn, tn, &r.pcc_degenerate);
    return r;
}

}  // namespace spect
