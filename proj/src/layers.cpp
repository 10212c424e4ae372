#include "spect/layers.hpp"

#include <cmath>

namespace spect {

namespace {

void expect_4d(const Tensor& t, const char* who) {
    if (t.shape.size() != 4) throw DataError(std::string(who) + ": expected 4-D tensor");
}

int conv_out_extent(int in, int k, int stride) { return (in + 2 * (k / 2) - k) / stride + 1; }

}  // namespace

Tensor conv2d_forward(const Tensor& in, const Tensor& w, const std::vector<double>& bias,
                      int stride) {
    expect_4d(in, "conv2d");
    expect_4d(w, "conv2d weights");
    if (stride != 1 && stride != 2) throw DataError("conv2d: stride must be 1 or 2");
    const int B = in.dim(0), C = in.dim(1), H = in.dim(2), W = in.dim(3);
    const int O = w.dim(0), k = w.dim(2);
    if (w.dim(1) != C) throw DataError("conv2d: weight in_ch mismatch");
    if (w.dim(3) != k || k % 2 == 0) throw DataError("conv2d: kernel must be square and odd");
    if (static_cast<int>(bias.size()) != O) throw DataError("conv2d: bias size mismatch");
    const int p = k / 2;
    const int OH = conv_out_extent(H, k, stride), OW = conv_out_extent(W, k, stride);

    Tensor out({B, O, OH, OW});
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b) {
        for (int o = 0; o < O; ++o) {
            for (int oy = 0; oy < OH; ++oy)
                for (int ox = 0; ox < OW; ++ox) {
                    double acc = bias[static_cast<size_t>(o)];
                    for (int c = 0; c < C; ++c) {
                        const double* inp = &in.data[(static_cast<size_t>(b) * C + c) *
                                                     static_cast<size_t>(H) * W];
                        const double* wp = &w.data[((static_cast<size_t>(o) * C + c) *
                                                    static_cast<size_t>(k)) * k];
                        for (int dy = 0; dy < k; ++dy) {
                            int iy = oy * stride + dy - p;
                            if (iy < 0 || iy >= H) continue;
                            for (int dx = 0; dx < k; ++dx) {
                                int ix = ox * stride + dx - p;
                                if (ix < 0 || ix >= W) continue;
                                acc += wp[dy * k + dx] * inp[static_cast<size_t>(iy) * W + ix];
                            }
                        }
                    }
                    out.at(b, o, oy, ox) = acc;
                }
        }
    }
    return out;
}

ConvGrads conv2d_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out, int stride) {
    expect_4d(in, "conv2d_backward");
    expect_4d(grad_out, "conv2d_backward grad");
    const int B = in.dim(0), C = in.dim(1), H = in.dim(2), W = in.dim(3);
    const int O = w.dim(0), k = w.dim(2), p = k / 2;
    const int OH = grad_out.dim(2), OW = grad_out.dim(3);
    if (grad_out.dim(0) != B || grad_out.dim(1) != O ||
        OH != conv_out_extent(H, k, stride) || OW != conv_out_extent(W, k, stride))
        throw DataError("conv2d_backward: grad_out shape mismatch");

    ConvGrads g;
    g.input = Tensor({B, C, H, W});
    g.weights = Tensor({O, C, k, k});
    g.bias.assign(static_cast<size_t>(O), 0.0);

    // grad_input: gather over the output positions each input pixel feeds.
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b) {
        for (int c = 0; c < C; ++c) {
            for (int iy = 0; iy < H; ++iy)
                for (int ix = 0; ix < W; ++ix) {
                    double acc = 0.0;
                    for (int dy = 0; dy < k; ++dy) {
                        int ty = iy + p - dy;
                        if (ty < 0 || ty % stride != 0) continue;
                        int oy = ty / stride;
                        if (oy >= OH) continue;
                        for (int dx = 0; dx < k; ++dx) {
                            int tx = ix + p - dx;
                            if (tx < 0 || tx % stride != 0) continue;
                            int ox = tx / stride;
                            if (ox >= OW) continue;
                            for (int o = 0; o < O; ++o)
                                acc += w.at(o, c, dy, dx) * grad_out.at(b, o, oy, ox);
                        }
                    }
                    g.input.at(b, c, iy, ix) = acc;
                }
        }
    }

    // grad_weights: one weight per thread, serial gather over batch and space.
#pragma omp parallel for schedule(static) collapse(2)
    for (int o = 0; o < O; ++o) {
        for (int c = 0; c < C; ++c) {
            for (int dy = 0; dy < k; ++dy)
                for (int dx = 0; dx < k; ++dx) {
                    double acc = 0.0;
                    for (int b = 0; b < B; ++b)
                        for (int oy = 0; oy < OH; ++oy) {
                            int iy = oy * stride + dy - p;
                            if (iy < 0 || iy >= H) continue;
                            for (int ox = 0; ox < OW; ++ox) {
                                int ix = ox * stride + dx - p;
                                if (ix < 0 || ix >= W) continue;
                                acc += grad_out.at(b, o, oy, ox) * in.at(b, c, iy, ix);
                            }
                        }
                    g.weights.at(o, c, dy, dx) = acc;
                }
        }
    }

#pragma omp parallel for schedule(static)
    for (int o = 0; o < O; ++o) {
        double acc = 0.0;
        for (int b = 0; b < B; ++b)
            for (int oy = 0; oy < OH; ++oy)
                for (int ox = 0; ox < OW; ++ox) acc += grad_out.at(b, o, oy, ox);
        g.bias[static_cast<size_t>(o)] = acc;
    }
    return g;
}

Tensor dense_forward(const Tensor& in, const Tensor& w, const std::vector<double>& bias) {
    if (in.shape.size() != 2) throw DataError("dense: expected 2-D input");
    const int B = in.dim(0), D = in.dim(1), O = w.dim(0);
    if (w.shape.size() != 2 || w.dim(1) != D) throw DataError("dense: weight shape mismatch");
    if (static_cast<int>(bias.size()) != O) throw DataError("dense: bias size mismatch");
    Tensor out({B, O});
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b) {
        for (int o = 0; o < O; ++o) {
            const double* inp = &in.data[static_cast<size_t>(b) * D];
            const double* wp = &w.data[static_cast<size_t>(o) * D];
            double acc = bias[static_cast<size_t>(o)];
            for (int i = 0; i < D; ++i) acc += wp[i] * inp[i];
            out.data[static_cast<size_t>(b) * O + o] = acc;
        }
    }
    return out;
}

DenseGrads dense_backward(const Tensor& in, const Tensor& w, const Tensor& grad_out) {
    const int B = in.dim(0), D = in.dim(1), O = w.dim(0);
    if (grad_out.dim(0) != B || grad_out.dim(1) != O)
        throw DataError("dense_backward: grad_out shape mismatch");
    DenseGrads g;
    g.input = Tensor({B, D});
    g.weights = Tensor({O, D});
    g.bias.assign(static_cast<size_t>(O), 0.0);
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b) {
        for (int i = 0; i < D; ++i) {
            double acc = 0.0;
            for (int o = 0; o < O; ++o)
                acc += w.data[static_cast<size_t>(o) * D + i] *
                       grad_out.data[static_cast<size_t>(b) * O + o];
            g.input.data[static_cast<size_t>(b) * D + i] = acc;
        }
    }
#pragma omp parallel for schedule(static) collapse(2)
    for (int o = 0; o < O; ++o) {
        for (int i = 0; i < D; ++i) {
            double acc = 0.0;
            for (int b = 0; b < B; ++b)
                acc += grad_out.data[static_cast<size_t>(b) * O + o] *
                       in.data[static_cast<size_t>(b) * D + i];
            g.weights.data[static_cast<size_t>(o) * D + i] = acc;
        }
    }
    for (int o = 0; o < O; ++o) {
        double acc = 0.0;
        for (int b = 0; b < B; ++b) acc += grad_out.data[static_cast<size_t>(b) * O + o];
        g.bias[static_cast<size_t>(o)] = acc;
    }
    return g;
}

Tensor relu_forward(const Tensor& in) {
    Tensor out = in;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Tensor relu_backward(const Tensor& in, const Tensor& grad_out) {
    if (in.size() != grad_out.size()) throw DataError("relu_backward: shape mismatch");
    Tensor g = grad_out;
    for (size_t i = 0; i < g.data.size(); ++i)
        if (in.data[i] <= 0.0) g.data[i] = 0.0;
    return g;
}

Tensor sigmoid_forward(const Tensor& in) {
    Tensor out = in;
    for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
    return out;
}

Tensor sigmoid_backward(const Tensor& out, const Tensor& grad_out) {
    if (out.size() != grad_out.size()) throw DataError("sigmoid_backward: shape mismatch");
    Tensor g = grad_out;
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] *= out.data[i] * (1.0 - out.data[i]);
    return g;
}

Tensor upsample2x_forward(const Tensor& in) {
    expect_4d(in, "upsample2x");
    const int B = in.dim(0), C = in.dim(1), H = in.dim(2), W = in.dim(3);
    Tensor out({B, C, 2 * H, 2 * W});
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < 2 * H; ++y)
                for (int x = 0; x < 2 * W; ++x) out.at(b, c, y, x) = in.at(b, c, y / 2, x / 2);
    return out;
}

Tensor upsample2x_backward(const Tensor& grad_out) {
    expect_4d(grad_out, "upsample2x_backward");
    const int B = grad_out.dim(0), C = grad_out.dim(1);
    const int H = grad_out.dim(2) / 2, W = grad_out.dim(3) / 2;
    if (grad_out.dim(2) % 2 != 0 || grad_out.dim(3) % 2 != 0)
        throw DataError("upsample2x_backward: odd grad extents");
    Tensor g({B, C, H, W});
#pragma omp parallel for schedule(static) collapse(2)
    for (int b = 0; b < B; ++b)
        for (int c = 0; c < C; ++c)
            for (int y = 0; y < H; ++y)
                for (int x = 0; x < W; ++x)
                    g.at(b, c, y, x) = grad_out.at(b, c, 2 * y, 2 * x) +
                                       grad_out.at(b, c, 2 * y, 2 * x + 1) +
                                       grad_out.at(b, c, 2 * y + 1, 2 * x) +
                                       grad_out.at(b, c, 2 * y + 1, 2 * x + 1);
    return g;
}

Tensor flatten_forward(const Tensor& in) {
    expect_4d(in, "flatten");
    Tensor out({in.dim(0), in.dim(1) * in.dim(2) * in.dim(3)});
    out.data = in.data;
    return out;
}

Tensor reshape_forward(const Tensor& in, int c, int h, int w) {
    if (in.shape.size() != 2) throw DataError("reshape: expected 2-D input");
    if (in.dim(1) != c * h * w) throw DataError("reshape: element count mismatch");
    Tensor out({in.dim(0), c, h, w});
    out.data = in.data;
    return out;
}

}  // namespace spect
