#pragma once

#include <cstdint>

#include "spect/types.hpp"

namespace spect {

// Random training phantom family: shape_count shapes drawn per image, each an
// ellipse, rectangle or gaussian blob with center uniform in the field-of-view
// disk, half-extents uniform in [n/16, n/3], rotation uniform in [0, pi) and
// intensity uniform in [0.2, 1.0]. Shapes compose additively, the result is
// clipped to [0, 1] and masked to the inscribed circle.
struct PhantomSpec {
    int n = 32;
    int shape_count_min = 1;
    int shape_count_max = 8;
};

// Deterministic function of (spec, seed): same seed, same phantom, bit for bit.
Image random_phantom(const PhantomSpec& spec, uint64_t seed);

// Classic ten-ellipse head phantom, rasterized on [-1,1]^2 at pixel centers.
// A pixel's value is the sum of the intensities of the ellipses containing its
// center, clamped below at zero. Throws DataError for n < 32.
Image shepp_logan(int n);

}  // namespace spect
