#pragma once

#include <cstdint>
#include <string>

#include "spect/rng.hpp"
#include "spect/types.hpp"

namespace spect {

// Count scaling s applied before Poisson sampling: 90%, 50% and 10% of the
// calibrated counts for low, medium and high noise. None keeps the expected
// counts and skips sampling; it exists as the noiseless baseline.
enum class NoiseLevel { None, Low, Medium, High };

double noise_scale(NoiseLevel level);
const char* noise_name(NoiseLevel level);
NoiseLevel parse_noise_level(const std::string& name);  // none|low|med|medium|high

// Expected total photon count at scale 1.0. The forward model is unitless, so
// this one number fixes the absolute statistics of every noise level.
struct CountCalibration {
    double total_counts = 2.0e5;

    static CountCalibration for_grid(int n) { return {n >= 128 ? 2.0e6 : 2.0e5}; }
};

// Exact Poisson draw. Inversion by sequential search below lambda = 10,
// Hormann's PTRS transformed rejection above. Throws on negative or
// non-finite lambda.
uint32_t poisson_sample(double lambda, Pcg32& rng);

// lambda_i = s * C * Y_i / sum(Y); each bin sampled independently from one
// stream seeded by `seed`, bins in row-major order. Zero bins stay zero and
// consume no randomness. NoiseLevel::None returns the lambda map itself.
Sinogram apply_poisson(const Sinogram& sino, NoiseLevel level, CountCalibration calib,
                       uint64_t seed);

}  // namespace spect
