#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "spect/types.hpp"

namespace spect {

// Linear forward model Y = P F and its transpose, restricted to a set of
// projection angles. EM reconstruction is written against this interface so
// tests can substitute tiny explicit matrices.
class SystemModel {
public:
    virtual ~SystemModel() = default;
    virtual int pixel_count() const = 0;
    virtual int angle_count() const = 0;
    virtual int bins_per_angle() const = 0;
    int ray_count() const { return angle_count() * bins_per_angle(); }

    // Fills sino rows for the listed angles (others untouched). image has
    // pixel_count() entries, sino has ray_count() entries, angle major.
    virtual void forward(std::span<const double> image, std::span<double> sino,
                         std::span<const int> angles) const = 0;
    // Accumulates the transpose of the listed angles' rows into image
    // (image is overwritten, not accumulated across calls).
    virtual void back(std::span<const double> sino, std::span<double> image,
                      std::span<const int> angles) const = 0;
};

// Ray-traced parallel-beam projector: one ray per bin center, exact
// pixel-intersection chord lengths. The matrix P is deterministic for a given
// geometry. Both directions use f64 accumulation; backprojection reduces
// per-angle partial images in fixed angle order, so results are bit-identical
// for any thread count.
class Projector : public SystemModel {
public:
    enum class Cache { Auto, On, Off };  // Auto caches the sparse matrix for n <= 64

    explicit Projector(const ScanGeometry& g, Cache cache = Cache::Auto);

    const ScanGeometry& geometry() const { return geom_; }
    bool cached() const { return cached_; }

    int pixel_count() const override { return geom_.n * geom_.n; }
    int angle_count() const override { return geom_.np; }
    int bins_per_angle() const override { return geom_.nr; }

    void forward(std::span<const double> image, std::span<double> sino,
                 std::span<const int> angles) const override;
    void back(std::span<const double> sino, std::span<double> image,
              std::span<const int> angles) const override;

    Sinogram forward_project(const Image& img) const;
    Image back_project(const Sinogram& sino) const;

    // s_j = sum_i P_ij, via back_project of the all-ones sinogram.
    Image sensitivity_map() const;

    // Sparse row of P for one ray: (pixel_index, chord_length) pairs, lengths > 0.
    // ray_index = angle * nr + bin.
    std::vector<std::pair<int, double>> matrix_row(int ray_index) const;

    std::vector<int> all_angles() const;

private:
    ScanGeometry geom_;
    bool cached_ = false;
    std::vector<size_t> row_start_;  // rays + 1
    std::vector<uint32_t> cols_;
    std::vector<double> lens_;
};

}  // namespace spect
