#include "spect/noise.hpp"

#include <cmath>

namespace spect {

double noise_scale(NoiseLevel level) {
    switch (level) {
        case NoiseLevel::None: return 1.0;
        case NoiseLevel::Low: return 0.9;
        case NoiseLevel::Medium: return 0.5;
        case NoiseLevel::High: return 0.1;
    }
    throw DataError("noise_scale: bad level");
}

const char* noise_name(NoiseLevel level) {
    switch (level) {
        case NoiseLevel::None: return "none";
        case NoiseLevel::Low: return "low";
        case NoiseLevel::Medium: return "medium";
        case NoiseLevel::High: return "high";
    }
    throw DataError("noise_name: bad level");
}

NoiseLevel parse_noise_level(const std::string& name) {
    if (name == "none") return NoiseLevel::None;
    if (name == "low") return NoiseLevel::Low;
    if (name == "med" || name == "medium") return NoiseLevel::Medium;
    if (name == "high") return NoiseLevel::High;
    throw UsageError("unknown noise level '" + name + "' (expected none|low|med|high)");
}

uint32_t poisson_sample(double lambda, Pcg32& rng) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw NumericError("poisson_sample: lambda must be finite and >= 0");
    if (lambda == 0.0) return 0;

    if (lambda < 10.0) {
        // Inversion by sequential search over the pmf.
        double p = std::exp(-lambda);
        double cdf = p;
        double u = rng.uniform();
        uint32_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= lambda / k;
            cdf += p;
        }
        return k;
    }

    // PTRS transformed rejection (Hormann 1993), exact for lambda >= 10.
    const double slam = std::sqrt(lambda);
    const double loglam = std::log(lambda);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        double u = rng.uniform() - 0.5;
        double v = rng.uniform();
        double us = 0.5 - std::abs(u);
        double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<uint32_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            k * loglam - lambda - std::lgamma(k + 1.0))
            return static_cast<uint32_t>(kf);
    }
}

Sinogram apply_poisson(const Sinogram& sino, NoiseLevel level, CountCalibration calib,
                       uint64_t seed) {
    if (!(calib.total_counts > 0.0)) throw DataError("apply_poisson: total_counts must be > 0");
    double total = 0.0;
    for (double y : sino.data) {
        if (!(y >= 0.0) || !std::isfinite(y))
            throw DataError("apply_poisson: sinogram must be finite and nonnegative");
        total += y;
    }
    if (total <= 0.0) throw DataError("apply_poisson: sinogram total is zero");

    double s = noise_scale(level);
    double factor = s * calib.total_counts / total;
    Sinogram out(sino.np, sino.nr);
    if (level == NoiseLevel::None) {
        for (size_t i = 0; i < sino.data.size(); ++i) out.data[i] = factor * sino.data[i];
        return out;
    }
    Pcg32 rng(seed);
    for (size_t i = 0; i < sino.data.size(); ++i) {
        double lambda = factor * sino.data[i];
        out.data[i] = lambda > 0.0 ? static_cast<double>(poisson_sample(lambda, rng)) : 0.0;
    }
    return out;
}

}  // namespace spect
