#pragma once

#include <vector>

#include "spect/types.hpp"

// Plain serial implementations kept for testing and benchmarking the OpenMP
// kernels. The projector pair below derives chord lengths by clipping every
// ray against every pixel box independently, so it shares no traversal code
// with the production projector. O(rays * n^2) - small inputs only.

namespace spect::ref {

// Chord length of the ray for (angle, bin) inside pixel (ix, iy).
double chord_length(const ScanGeometry& g, int angle, int bin, int ix, int iy);

Sinogram forward_project(const ScanGeometry& g, const Image& img);
Image back_project(const ScanGeometry& g, const Sinogram& sino);

// Naive dense/conv kernels (single loop nest, no parallelism); see layers.hpp
// for the shapes.
std::vector<double> conv2d_forward(const std::vector<double>& in, int b, int c_in, int h, int w,
                                   const std::vector<double>& weights, int c_out, int k, int stride,
                                   const std::vector<double>& bias);
std::vector<double> dense_forward(const std::vector<double>& in, int b, int d_in,
                                  const std::vector<double>& weights, int d_out,
                                  const std::vector<double>& bias);

}  // namespace spect::ref
