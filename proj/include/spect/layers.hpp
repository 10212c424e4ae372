#pragma once

#include <vector>

#include "spect/tensor.hpp"

namespace spect {

// Layer primitives. Convolutions use odd kernels, zero padding k/2 and
// stride 1 or 2; weights are (out_ch, in_ch, k, k). All backward kernels are
// exact gradients of the forward maps, written as gathers so OpenMP execution
// is bit-identical to serial. relu'(0) = 0 by convention.

Tensor conv2d_forward(const Tensor& in, const Tensor& w, const std::vector<double>& bias,
                      int stride);
struct ConvGrads {
    Tensor input;
    Tensor weights;
    std::vector<double> bias;
};
ConvGrads conv2d_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, int stride);

Tensor dense_forward(const Tensor& in, const Tensor& w, const std::vector<double>& bias);
struct DenseGrads {
    Tensor input;
    Tensor weights;
    std::vector<double> bias;
};
DenseGrads dense_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out);

Tensor relu_forward(const Tensor& in);
Tensor relu_backward(const Tensor& in, const Tensor& grad_out);

Tensor sigmoid_forward(const Tensor& in);
// Takes the forward output (sigmoid values), not the input.
Tensor sigmoid_backward(const Tensor& out, const Tensor& grad_out);

// Nearest-neighbor 2x upsampling; backward sums each 2x2 block.
Tensor upsample2x_forward(const Tensor& in);
Tensor upsample2x_backward(const Tensor& grad_out);

Tensor flatten_forward(const Tensor& in);                       // (B,C,H,W) -> (B,CHW)
Tensor reshape_forward(const Tensor& in, int c, int h, int w);  // (B,D) -> (B,c,h,w)

}  // namespace spect
