#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spect/tensor.hpp"

namespace spect {

// Architecture config grammar, one layer per line, '#' comments:
//   conv in=<int> out=<int> k=<int> s=<int>
//   dense in=<int> out=<int>
//   relu | sigmoid | upsample2x | flatten
//   reshape c=<int> h=<int> w=<int>
// Unknown directives or keys are parse errors (reported with line numbers).
struct LayerSpec {
    enum class Kind { Conv, Dense, Relu, Sigmoid, Upsample2x, Flatten, Reshape };
    Kind kind;
    int in_ch = 0, out_ch = 0, k = 0, stride = 1;  // conv
    int in_dim = 0, out_dim = 0;                   // dense
    int c = 0, h = 0, w = 0;                       // reshape
};

std::vector<LayerSpec> parse_model_config(const std::string& text);

// Either a flat feature vector or a (c, h, w) volume.
struct LayerShape {
    bool flat = false;
    int c = 0, h = 0, w = 0;
    int flat_dim = 0;
    int64_t count() const { return flat ? flat_dim : static_cast<int64_t>(c) * h * w; }
    std::string str() const;
};

// Walks the layer list from a (1, in_h, in_w) input and returns the shape
// after every layer; throws DataError where shapes fail to compose.
std::vector<LayerShape> validate_shapes(const std::vector<LayerSpec>& specs, int in_h, int in_w);

int64_t parameter_count(const std::vector<LayerSpec>& specs);

// Encoder-decoder network with parameters. Construction validates shapes and
// initializes weights Kaiming-uniform (fan-in) from the seed, biases zero.
class Model {
public:
    Model(std::string config_text, int in_h, int in_w, uint64_t seed);

    const std::string& config_text() const { return config_text_; }
    const std::vector<LayerSpec>& specs() const { return specs_; }
    int input_h() const { return in_h_; }
    int input_w() const { return in_w_; }
    int output_h() const { return out_h_; }
    int output_w() const { return out_w_; }
    int64_t parameter_count() const;

    // Inference. Input (B, 1, in_h, in_w) -> output (B, 1, out_h, out_w).
    // Any non-finite activation aborts with the layer index.
    Tensor forward(const Tensor& input) const;

    // Training-mode forward keeping per-layer activations for backward.
    struct Trace {
        std::vector<Tensor> act;  // act[0] = input, act[i+1] = output of layer i
    };
    Tensor forward_train(const Tensor& input, Trace& trace) const;

    struct Gradients {
        std::vector<Tensor> weights;             // empty tensor for layers without parameters
        std::vector<std::vector<double>> bias;
    };
    Gradients backward(const Trace& trace, const Tensor& grad_output) const;

    // Flat views over all parameters, layer by layer (weights then bias), for
    // the optimizer.
    std::vector<std::pair<double*, size_t>> parameter_views();
    std::vector<std::pair<const double*, size_t>> parameter_views() const;

    std::vector<Tensor>& weights() { return weights_; }
    std::vector<std::vector<double>>& biases() { return biases_; }
    const std::vector<Tensor>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& biases() const { return biases_; }

private:
    std::string config_text_;
    std::vector<LayerSpec> specs_;
    std::vector<LayerShape> shapes_;
    int in_h_, in_w_, out_h_ = 0, out_w_ = 0;
    std::vector<Tensor> weights_;
    std::vector<std::vector<double>> biases_;

    Tensor run(const Tensor& input, Trace* trace) const;
};

// Model container file: magic "TOMM", version, input dims, config text block,
// then one embedded TOMO blob (f64) per parameter array in layer order,
// weights before bias. Round-trips bit-exactly.
void save_model(const Model& model, const std::string& path);
Model load_model(const std::string& path);

}  // namespace spect
