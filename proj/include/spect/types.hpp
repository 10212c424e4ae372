#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace spect {

// Error categories. The CLI maps them to exit codes:
// usage = 2, data = 3, numeric = 4.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Parallel-beam scan description. Angles are theta_k = k * angle_span / np,
// k = 0..np-1, counterclockwise from theta = 0. For angle theta the detector
// axis is (cos theta, sin theta) and rays run along (-sin theta, cos theta).
// Bin k is centered at t_k = (k - (nr - 1)/2) * bin_width on the detector
// axis. Pixels have unit size with centers at (c - (n - 1)/2) on both axes.
struct ScanGeometry {
    int n = 32;     // image side, pixels
    int np = 32;    // projection angles
    int nr = 48;    // detector bins per angle
    double bin_width = 1.0;             // in pixel units
    double angle_span = 2.0 * M_PI;     // radians

    double angle(int k) const { return angle_span * static_cast<double>(k) / np; }
    double bin_center(int k) const { return (k - (nr - 1) / 2.0) * bin_width; }
    int ray_count() const { return np * nr; }
    bool covers_grid() const { return nr * bin_width >= n * std::sqrt(2.0); }

    void validate() const {
        if (n < 1) throw DataError("geometry: n must be >= 1");
        if (np < 1) throw DataError("geometry: np must be >= 1");
        if (nr < 1) throw DataError("geometry: nr must be >= 1");
        if (!(bin_width > 0.0)) throw DataError("geometry: bin_width must be > 0");
        if (!(angle_span > 0.0)) throw DataError("geometry: angle_span must be > 0");
        if (!covers_grid())
            throw DataError("geometry: detector too narrow, need nr * bin_width >= n * sqrt(2)");
    }
};

// Square activity image, row major: data[y * n + x]. Values are activity in
// arbitrary units; FBP output is the one place negatives are expected.
struct Image {
    int n = 0;
    std::vector<double> data;

    Image() = default;
    explicit Image(int side, double fill = 0.0) : n(side), data(static_cast<size_t>(side) * side, fill) {}

    double& at(int y, int x) { return data[static_cast<size_t>(y) * n + x]; }
    double at(int y, int x) const { return data[static_cast<size_t>(y) * n + x]; }
    size_t size() const { return data.size(); }
};

// Projection data, angle major: data[a * nr + b] for angle a, bin b.
struct Sinogram {
    int np = 0;
    int nr = 0;
    std::vector<double> data;

    Sinogram() = default;
    Sinogram(int angles, int bins, double fill = 0.0)
        : np(angles), nr(bins), data(static_cast<size_t>(angles) * bins, fill) {}

    double& at(int a, int b) { return data[static_cast<size_t>(a) * nr + b]; }
    double at(int a, int b) const { return data[static_cast<size_t>(a) * nr + b]; }
    size_t size() const { return data.size(); }

    bool matches(const ScanGeometry& g) const { return np == g.np && nr == g.nr; }
};

inline double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace spect
