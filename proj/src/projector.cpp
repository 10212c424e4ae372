#include "spect/projector.hpp"

#include <numeric>

#include "siddon.hpp"

namespace spect {

Projector::Projector(const ScanGeometry& g, Cache cache) : geom_(g) {
    geom_.validate();
    cached_ = cache == Cache::On || (cache == Cache::Auto && geom_.n <= 64);
    if (!cached_) return;

    const int rays = geom_.ray_count();
    row_start_.assign(static_cast<size_t>(rays) + 1, 0);
    std::vector<std::vector<std::pair<uint32_t, double>>> rows(static_cast<size_t>(rays));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < rays; ++i) {
        auto ray = detail::bin_ray(geom_, i / geom_.nr, i % geom_.nr);
        auto& row = rows[static_cast<size_t>(i)];
        detail::trace_ray(geom_.n, ray, [&](int j, double len) {
            row.emplace_back(static_cast<uint32_t>(j), len);
        });
    }
    size_t total = 0;
    for (int i = 0; i < rays; ++i) {
        row_start_[static_cast<size_t>(i)] = total;
        total += rows[static_cast<size_t>(i)].size();
    }
    row_start_[static_cast<size_t>(rays)] = total;
    cols_.resize(total);
    lens_.resize(total);
    for (int i = 0; i < rays; ++i) {
        size_t off = row_start_[static_cast<size_t>(i)];
        for (const auto& [j, len] : rows[static_cast<size_t>(i)]) {
            cols_[off] = j;
            lens_[off] = len;
            ++off;
        }
    }
}

std::vector<int> Projector::all_angles() const {
    std::vector<int> a(static_cast<size_t>(geom_.np));
    std::iota(a.begin(), a.end(), 0);
    return a;
}

void Projector::forward(std::span<const double> image, std::span<double> sino,
                        std::span<const int> angles) const {
    if (image.size() != static_cast<size_t>(pixel_count()))
        throw DataError("forward_project: image size does not match geometry");
    if (sino.size() != static_cast<size_t>(ray_count()))
        throw DataError("forward_project: sinogram size does not match geometry");
    const int na = static_cast<int>(angles.size());
    const int nr = geom_.nr;
#pragma omp parallel for schedule(static) collapse(2)
    for (int ai = 0; ai < na; ++ai) {
        for (int b = 0; b < nr; ++b) {
            const int a = angles[static_cast<size_t>(ai)];
            const int i = a * nr + b;
            double acc = 0.0;
            if (cached_) {
                for (size_t e = row_start_[static_cast<size_t>(i)];
                     e < row_start_[static_cast<size_t>(i) + 1]; ++e)
                    acc += lens_[e] * image[cols_[e]];
            } else {
                auto ray = detail::bin_ray(geom_, a, b);
                detail::trace_ray(geom_.n, ray,
                                  [&](int j, double len) { acc += len * image[static_cast<size_t>(j)]; });
            }
            sino[static_cast<size_t>(i)] = acc;
        }
    }
}

void Projector::back(std::span<const double> sino, std::span<double> image,
                     std::span<const int> angles) const {
    if (image.size() != static_cast<size_t>(pixel_count()))
        throw DataError("back_project: image size does not match geometry");
    if (sino.size() != static_cast<size_t>(ray_count()))
        throw DataError("back_project: sinogram size does not match geometry");
    const int na = static_cast<int>(angles.size());
    const int nr = geom_.nr;
    const size_t npx = static_cast<size_t>(pixel_count());

    // One partial image per angle, reduced in listed order below. The serial
    // evaluation of the same structure produces identical bits.
    std::vector<double> partial(static_cast<size_t>(na) * npx, 0.0);
#pragma omp parallel for schedule(static)
    for (int ai = 0; ai < na; ++ai) {
        const int a = angles[static_cast<size_t>(ai)];
        double* part = partial.data() + static_cast<size_t>(ai) * npx;
        for (int b = 0; b < nr; ++b) {
            const int i = a * nr + b;
            const double y = sino[static_cast<size_t>(i)];
            if (y == 0.0) continue;
            if (cached_) {
                for (size_t e = row_start_[static_cast<size_t>(i)];
                     e < row_start_[static_cast<size_t>(i) + 1]; ++e)
                    part[cols_[e]] += lens_[e] * y;
            } else {
                auto ray = detail::bin_ray(geom_, a, b);
                detail::trace_ray(geom_.n, ray,
                                  [&](int j, double len) { part[static_cast<size_t>(j)] += len * y; });
            }
        }
    }
    std::fill(image.begin(), image.end(), 0.0);
    for (int ai = 0; ai < na; ++ai) {
        const double* part = partial.data() + static_cast<size_t>(ai) * npx;
        for (size_t j = 0; j < npx; ++j) image[j] += part[j];
    }
}

Sinogram Projector::forward_project(const Image& img) const {
    if (img.n != geom_.n) throw DataError("forward_project: image side does not match geometry");
    Sinogram out(geom_.np, geom_.nr);
    auto angles = all_angles();
    forward(img.data, out.data, angles);
    return out;
}

Image Projector::back_project(const Sinogram& sino) const {
    if (!sino.matches(geom_)) throw DataError("back_project: sinogram shape does not match geometry");
    Image out(geom_.n);
    auto angles = all_angles();
    back(sino.data, out.data, angles);
    return out;
}

Image Projector::sensitivity_map() const {
    Sinogram ones(geom_.np, geom_.nr, 1.0);
    return back_project(ones);
}

std::vector<std::pair<int, double>> Projector::matrix_row(int ray_index) const {
    if (ray_index < 0 || ray_index >= ray_count())
        throw DataError("matrix_row: ray index out of range");
    std::vector<std::pair<int, double>> row;
    if (cached_) {
        for (size_t e = row_start_[static_cast<size_t>(ray_index)];
             e < row_start_[static_cast<size_t>(ray_index) + 1]; ++e)
            row.emplace_back(static_cast<int>(cols_[e]), lens_[e]);
        return row;
    }
    auto ray = detail::bin_ray(geom_, ray_index / geom_.nr, ray_index % geom_.nr);
    detail::trace_ray(geom_.n, ray, [&](int j, double len) { row.emplace_back(j, len); });
    return row;
}

}  // namespace spect
