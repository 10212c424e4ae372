#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "spect/model.hpp"
#include "spect/ssim.hpp"

namespace spect {

// One training pair: a min-max normalized noisy sinogram (model input, laid
// out (in_h, in_w) = (nr, np)) and the [0,1] phantom target (n x n).
struct TrainItem {
    std::vector<double> input;
    std::vector<double> target;
};

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch = 32;
    int epochs = 30;
    uint64_t seed = 0;
};

struct EpochStats {
    double train_loss;  // mean (1 - SSIM) over the epoch's batches
    double val_loss;    // mean (1 - SSIM) over the validation set, post-epoch
};

struct TrainResult {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;       // epoch index with lowest validation loss
    double best_val = 0.0;
};

// Minimizes mean (1 - SSIM) with Adam. Items are split 90/10 into disjoint
// train/validation sets by a seeded shuffle; the returned model carries the
// best-validation weights. Deterministic for a fixed seed at any thread
// count. `progress`, when set, receives one line per epoch.
TrainResult train(Model& model, const std::vector<TrainItem>& items, const TrainConfig& cfg,
                  std::ostream* progress = nullptr);

// The SSIM objective used by training and its batch gradient.
double batch_loss(const Model& model, const std::vector<TrainItem>& items,
                  const std::vector<int>& indices, int batch);

}  // namespace spect
