#pragma once

#include <functional>
#include <vector>

#include "spect/projector.hpp"
#include "spect/types.hpp"

namespace spect {

// Expectation-maximization reconstruction settings. subsets = 1 is MLEM;
// subsets > 1 cycles the multiplicative update over interleaved angle subsets
// (subset t holds angles {t, t+subsets, ...}), one pass over all subsets per
// iteration. epsilon guards ratios against empty forward projections.
struct EmConfig {
    int iterations = 100;
    int subsets = 1;
    double epsilon = 1e-12;
    double initial_value = 1.0;
};

struct EmResult {
    Image image;  // image.n = 0 if the model's pixel count is not a square
    // Poisson log-likelihood sum_i (Y_i ln(PF)_i - (PF)_i) after each full
    // iteration; terms with Y_i = 0 contribute -(PF)_i.
    std::vector<double> log_likelihood;
};

// Called after each full iteration with (iteration index starting at 1,
// current image). Used by the benchmark to snapshot checkpoints.
using EmCallback = std::function<void(int, const std::vector<double>&)>;

EmResult mlem(const Sinogram& sino, const SystemModel& model, const EmConfig& cfg = {},
              const EmCallback& on_iteration = nullptr);
EmResult osem(const Sinogram& sino, const SystemModel& model, const EmConfig& cfg,
              const EmCallback& on_iteration = nullptr);

}  // namespace spect
