#pragma once

#include <string>

#include "spect/ssim.hpp"
#include "spect/types.hpp"

namespace spect {

// Evaluation protocol: both images are min-max normalized to [0,1] before any
// metric, so signed FBP output and count-scaled EM output are comparable.
struct MetricReport {
    double mse = 0.0;
    double mae = 0.0;
    double ssim = 0.0;
    double pcc = 0.0;
    bool pcc_degenerate = false;  // a constant input; pcc reported as 0
    std::string method;
    std::string noise_level;
    int phantom_id = -1;
};

// Min-max rescale to [0,1]; a constant image maps to all zeros.
Image normalize(const Image& img);

double mse(const Image& x, const Image& y);
double mae(const Image& x, const Image& y);
double pcc(const Image& x, const Image& y, bool* degenerate = nullptr);

// Normalizes both inputs, then computes all four metrics (SSIM with L = 1;
// global statistics by default, windowed 8x8/stride-4 behind the flag).
MetricReport evaluate(const Image& reconstruction, const Image& truth,
                      bool windowed_ssim = false);

}  // namespace spect
