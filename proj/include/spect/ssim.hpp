#pragma once

#include <span>
#include <vector>

#include "spect/types.hpp"

namespace spect {

// Structural similarity with global image statistics (population divisors):
//   SSIM = (2 mx my + C1)(2 cov + C2) / ((mx^2 + my^2 + C1)(vx + vy + C2))
// C1 = (k1 L)^2, C2 = (k2 L)^2 with L the dynamic range of the pixel values.
struct SsimParams {
    double k1 = 0.01;
    double k2 = 0.03;
    double L = 1.0;

    double c1() const { return (k1 * L) * (k1 * L); }
    double c2() const { return (k2 * L) * (k2 * L); }
};

double ssim(std::span<const double> x, std::span<const double> y, const SsimParams& p = {});

// Analytic gradient of the loss (1 - SSIM) with respect to every pixel of x.
std::vector<double> ssim_loss_grad(std::span<const double> x, std::span<const double> y,
                                   const SsimParams& p = {});

// Mean of global SSIM over uniform windows (win x win, given stride, windows
// clipped to start so they fit). Falls back to the global form when the image
// is smaller than one window.
double ssim_windowed(const Image& x, const Image& y, const SsimParams& p = {}, int win = 8,
                     int stride = 4);

}  // namespace spect
