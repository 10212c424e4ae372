#pragma once

#include <vector>

#include "spect/types.hpp"

namespace spect {

// Filtered back projection. Rows are convolved with the discrete ramp kernel
// in the spatial domain (full convolution, central nr samples kept), then
// smeared back pixel-driven with linear interpolation over bins and scaled by
// angle_span / (2 np). Output is signed; no clamping.
struct FbpConfig {
    enum class Filter { RamLak, Hann };
    Filter filter = Filter::RamLak;
};

// Discrete Ram-Lak sequence, length 2*half_width+1, centered:
// h[0] = 1/(4 w^2), h[k] = -1/(pi^2 k^2 w^2) for odd k, 0 for even k != 0.
std::vector<double> ramp_kernel(int half_width, double bin_width);

Image fbp(const Sinogram& sino, const ScanGeometry& g, const FbpConfig& cfg = {});

}  // namespace spect
