#include "spect/em.hpp"

#include <cmath>

namespace spect {

namespace {

struct Subset {
    std::vector<int> angles;
    std::vector<double> sensitivity;
};

double log_likelihood(const SystemModel& model, const std::vector<double>& image,
                      const Sinogram& sino, const std::vector<int>& all_angles,
                      std::vector<double>& lam, double eps) {
    model.forward(image, lam, all_angles);
    double ll = 0.0;
    for (size_t i = 0; i < lam.size(); ++i) {
        double y = sino.data[i];
        ll -= lam[i];
        if (y > 0.0) ll += y * std::log(std::max(lam[i], eps));
    }
    return ll;
}

EmResult run_em(const Sinogram& sino, const SystemModel& model, const EmConfig& cfg,
                const EmCallback& on_iteration) {
    if (sino.np != model.angle_count() || sino.nr != model.bins_per_angle())
        throw DataError("em: sinogram shape does not match the system model");
    if (cfg.iterations < 1) throw DataError("em: iterations must be >= 1");
    if (cfg.subsets < 1 || model.angle_count() % cfg.subsets != 0)
        throw DataError("em: subsets must divide the angle count");
    if (!(cfg.initial_value > 0.0)) throw DataError("em: initial image must be strictly positive");
    for (double y : sino.data)
        if (!(y >= 0.0) || !std::isfinite(y))
            throw DataError("em: sinogram must be finite and nonnegative");

    const size_t npx = static_cast<size_t>(model.pixel_count());
    const size_t nrays = static_cast<size_t>(model.ray_count());
    const int np = model.angle_count();

    std::vector<int> all_angles(static_cast<size_t>(np));
    for (int a = 0; a < np; ++a) all_angles[static_cast<size_t>(a)] = a;

    std::vector<Subset> subsets(static_cast<size_t>(cfg.subsets));
    std::vector<double> ones(nrays, 1.0);
    for (int t = 0; t < cfg.subsets; ++t) {
        auto& sub = subsets[static_cast<size_t>(t)];
        for (int a = t; a < np; a += cfg.subsets) sub.angles.push_back(a);
        sub.sensitivity.assign(npx, 0.0);
        model.back(ones, sub.sensitivity, sub.angles);
    }
    std::vector<double> sens_full(npx, 0.0);
    model.back(ones, sens_full, all_angles);

    // Pixels never seen by any ray are frozen at zero and excluded.
    std::vector<double> x(npx);
    for (size_t j = 0; j < npx; ++j) x[j] = sens_full[j] > 0.0 ? cfg.initial_value : 0.0;

    std::vector<double> lam(nrays, 0.0);
    std::vector<double> ratio(nrays, 0.0);
    std::vector<double> corr(npx, 0.0);

    EmResult result;
    result.log_likelihood.reserve(static_cast<size_t>(cfg.iterations));
    for (int it = 1; it <= cfg.iterations; ++it) {
        for (const auto& sub : subsets) {
            model.forward(x, lam, sub.angles);
            for (int a : sub.angles) {
                size_t off = static_cast<size_t>(a) * static_cast<size_t>(sino.nr);
                for (int b = 0; b < sino.nr; ++b) {
                    size_t i = off + static_cast<size_t>(b);
                    double y = sino.data[i];
                    double l = lam[i];
                    ratio[i] = l > cfg.epsilon ? y / l : (y > 0.0 ? y / cfg.epsilon : 0.0);
                }
            }
            model.back(ratio, corr, sub.angles);
            for (size_t j = 0; j < npx; ++j)
                if (sub.sensitivity[j] > 0.0) x[j] *= corr[j] / sub.sensitivity[j];
        }
        result.log_likelihood.push_back(log_likelihood(model, x, sino, all_angles, lam, cfg.epsilon));
        if (on_iteration) on_iteration(it, x);
    }

    int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(npx))));
    result.image.n = static_cast<size_t>(side) * side == npx ? side : 0;
    result.image.data = std::move(x);
    return result;
}

}  // namespace

EmResult mlem(const Sinogram& sino, const SystemModel& model, const EmConfig& cfg,
              const EmCallback& on_iteration) {
    EmConfig c = cfg;
    c.subsets = 1;
    return run_em(sino, model, c, on_iteration);
}

EmResult osem(const Sinogram& sino, const SystemModel& model, const EmConfig& cfg,
              const EmCallback& on_iteration) {
    return run_em(sino, model, cfg, on_iteration);
}

}  // namespace spect
