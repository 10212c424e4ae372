#include "spect/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "spect/array_io.hpp"
#include "spect/layers.hpp"
#include "spect/rng.hpp"

namespace spect {

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& msg) {
    throw DataError("model config line " + std::to_string(line_no) + ": " + msg);
}

// key=value tokens after the directive word
int take_int(std::vector<std::pair<std::string, std::string>>& kv, const std::string& key,
             int line_no) {
    for (auto it = kv.begin(); it != kv.end(); ++it) {
        if (it->first == key) {
            int v;
            try {
                size_t pos;
                v = std::stoi(it->second, &pos);
                if (pos != it->second.size()) throw std::invalid_argument("");
            } catch (...) {
                parse_fail(line_no, "bad integer for " + key + ": '" + it->second + "'");
            }
            kv.erase(it);
            return v;
        }
    }
    parse_fail(line_no, "missing key " + key);
}

}  // namespace

std::vector<LayerSpec> parse_model_config(const std::string& text) {
    std::vector<LayerSpec> specs;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;

        std::vector<std::pair<std::string, std::string>> kv;
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos) parse_fail(line_no, "expected key=value, got '" + tok + "'");
            kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }

        LayerSpec s;
        if (word == "conv") {
            s.kind = LayerSpec::Kind::Conv;
            s.in_ch = take_int(kv, "in", line_no);
            s.out_ch = take_int(kv, "out", line_no);
            s.k = take_int(kv, "k", line_no);
            s.stride = take_int(kv, "s", line_no);
            if (s.in_ch < 1 || s.out_ch < 1) parse_fail(line_no, "conv channels must be >= 1");
            if (s.k < 1 || s.k % 2 == 0) parse_fail(line_no, "conv kernel must be odd and >= 1");
            if (s.stride != 1 && s.stride != 2) parse_fail(line_no, "conv stride must be 1 or 2");
        } else if (word == "dense") {
            s.kind = LayerSpec::Kind::Dense;
            s.in_dim = take_int(kv, "in", line_no);
            s.out_dim = take_int(kv, "out", line_no);
            if (s.in_dim < 1 || s.out_dim < 1) parse_fail(line_no, "dense dims must be >= 1");
        } else if (word == "relu") {
            s.kind = LayerSpec::Kind::Relu;
        } else if (word == "sigmoid") {
            s.kind = LayerSpec::Kind::Sigmoid;
        } else if (word == "upsample2x") {
            s.kind = LayerSpec::Kind::Upsample2x;
        } else if (word == "flatten") {
            s.kind = LayerSpec::Kind::Flatten;
        } else if (word == "reshape") {
            s.kind = LayerSpec::Kind::Reshape;
            s.c = take_int(kv, "c", line_no);
            s.h = take_int(kv, "h", line_no);
            s.w = take_int(kv, "w", line_no);
            if (s.c < 1 || s.h < 1 || s.w < 1) parse_fail(line_no, "reshape dims must be >= 1");
        } else {
            parse_fail(line_no, "unknown layer '" + word + "'");
        }
        if (!kv.empty()) parse_fail(line_no, "unknown key '" + kv.front().first + "'");
        specs.push_back(s);
    }
    if (specs.empty()) throw DataError("model config: no layers");
    return specs;
}

std::string LayerShape::str() const {
    if (flat) return "(" + std::to_string(flat_dim) + ")";
    return "(" + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

std::vector<LayerShape> validate_shapes(const std::vector<LayerSpec>& specs, int in_h, int in_w) {
    if (in_h < 1 || in_w < 1) throw DataError("validate_shapes: bad input extents");
    LayerShape cur{false, 1, in_h, in_w, 0};
    std::vector<LayerShape> out;
    for (size_t li = 0; li < specs.size(); ++li) {
        const LayerSpec& s = specs[li];
        std::string where = "layer " + std::to_string(li + 1);
        switch (s.kind) {
            case LayerSpec::Kind::Conv: {
                if (cur.flat) throw DataError(where + ": conv on flat input " + cur.str());
                if (cur.c != s.in_ch)
                    throw DataError(where + ": conv expects in=" + std::to_string(s.in_ch) +
                                    " channels, input is " + cur.str());
                int p = s.k / 2;
                cur.c = s.out_ch;
                cur.h = (cur.h + 2 * p - s.k) / s.stride + 1;
                cur.w = (cur.w + 2 * p - s.k) / s.stride + 1;
                if (cur.h < 1 || cur.w < 1) throw DataError(where + ": conv output collapsed");
                break;
            }
            case LayerSpec::Kind::Dense:
                if (!cur.flat)
                    throw DataError(where + ": dense needs a flat input, got " + cur.str() +
                                    " (insert flatten)");
                if (cur.flat_dim != s.in_dim)
                    throw DataError(where + ": dense expects in=" + std::to_string(s.in_dim) +
                                    ", input is " + cur.str());
                cur.flat_dim = s.out_dim;
                break;
            case LayerSpec::Kind::Relu:
            case LayerSpec::Kind::Sigmoid:
                break;
            case LayerSpec::Kind::Upsample2x:
                if (cur.flat) throw DataError(where + ": upsample2x on flat input");
                cur.h *= 2;
                cur.w *= 2;
                break;
            case LayerSpec::Kind::Flatten:
                if (cur.flat) throw DataError(where + ": flatten on flat input");
                cur = LayerShape{true, 0, 0, 0, cur.c * cur.h * cur.w};
                break;
            case LayerSpec::Kind::Reshape:
                if (!cur.flat) throw DataError(where + ": reshape needs a flat input");
                if (cur.flat_dim != s.c * s.h * s.w)
                    throw DataError(where + ": reshape to " + std::to_string(s.c * s.h * s.w) +
                                    " elements from " + cur.str());
                cur = LayerShape{false, s.c, s.h, s.w, 0};
                break;
        }
        out.push_back(cur);
    }
    return out;
}

int64_t parameter_count(const std::vector<LayerSpec>& specs) {
    int64_t total = 0;
    for (const auto& s : specs) {
        if (s.kind == LayerSpec::Kind::Conv)
            total += static_cast<int64_t>(s.out_ch) * s.in_ch * s.k * s.k + s.out_ch;
        else if (s.kind == LayerSpec::Kind::Dense)
            total += static_cast<int64_t>(s.out_dim) * s.in_dim + s.out_dim;
    }
    return total;
}

Model::Model(std::string config_text, int in_h, int in_w, uint64_t seed)
    : config_text_(std::move(config_text)), in_h_(in_h), in_w_(in_w) {
    specs_ = parse_model_config(config_text_);
    shapes_ = validate_shapes(specs_, in_h_, in_w_);
    const LayerShape& last = shapes_.back();
    if (last.flat) throw DataError("model: output must be a volume, ends flat " + last.str());
    if (last.c != 1) throw DataError("model: output must have one channel, got " + last.str());
    out_h_ = last.h;
    out_w_ = last.w;

    Pcg32 rng(seed);
    weights_.resize(specs_.size());
    biases_.resize(specs_.size());
    for (size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& s = specs_[i];
        if (s.kind == LayerSpec::Kind::Conv) {
            weights_[i] = Tensor({s.out_ch, s.in_ch, s.k, s.k});
            biases_[i].assign(static_cast<size_t>(s.out_ch), 0.0);
            double bound = std::sqrt(6.0 / (static_cast<double>(s.in_ch) * s.k * s.k));
            for (double& v : weights_[i].data) v = rng.uniform(-bound, bound);
        } else if (s.kind == LayerSpec::Kind::Dense) {
            weights_[i] = Tensor({s.out_dim, s.in_dim});
            biases_[i].assign(static_cast<size_t>(s.out_dim), 0.0);
            double bound = std::sqrt(6.0 / static_cast<double>(s.in_dim));
            for (double& v : weights_[i].data) v = rng.uniform(-bound, bound);
        }
    }
}

int64_t Model::parameter_count() const { return spect::parameter_count(specs_); }

namespace {

void check_finite(const Tensor& t, size_t layer_idx) {
    for (double v : t.data)
        if (!std::isfinite(v))
            throw NumericError("model: non-finite activation after layer " +
                               std::to_string(layer_idx));
}

}  // namespace

Tensor Model::run(const Tensor& input, Trace* trace) const {
    if (input.shape.size() != 4 || input.dim(1) != 1 || input.dim(2) != in_h_ ||
        input.dim(3) != in_w_)
        throw DataError("model: input shape " + input.shape_str() + " does not match (B,1," +
                        std::to_string(in_h_) + "," + std::to_string(in_w_) + ")");
    check_finite(input, 0);
    Tensor cur = input;
    if (trace) {
        trace->act.clear();
        trace->act.reserve(specs_.size() + 1);
        trace->act.push_back(cur);
    }
    for (size_t i = 0; i < specs_.size(); ++i) {
        const LayerSpec& s = specs_[i];
        switch (s.kind) {
            case LayerSpec::Kind::Conv:
                cur = conv2d_forward(cur, weights_[i], biases_[i], s.stride);
                break;
            case LayerSpec::Kind::Dense:
                cur = dense_forward(cur, weights_[i], biases_[i]);
                break;
            case LayerSpec::Kind::Relu:
                cur = relu_forward(cur);
                break;
            case LayerSpec::Kind::Sigmoid:
                cur = sigmoid_forward(cur);
                break;
            case LayerSpec::Kind::Upsample2x:
                cur = upsample2x_forward(cur);
                break;
            case LayerSpec::Kind::Flatten:
                cur = flatten_forward(cur);
                break;
            case LayerSpec::Kind::Reshape:
                cur = reshape_forward(cur, s.c, s.h, s.w);
                break;
        }
        check_finite(cur, i + 1);
        if (trace) trace->act.push_back(cur);
    }
    return cur;
}

Tensor Model::forward(const Tensor& input) const { return run(input, nullptr); }

Tensor Model::forward_train(const Tensor& input, Trace& trace) const { return run(input, &trace); }

Model::Gradients Model::backward(const Trace& trace, const Tensor& grad_output) const {
    if (trace.act.size() != specs_.size() + 1)
        throw DataError("model backward: trace does not match this model");
    Gradients g;
    g.weights.resize(specs_.size());
    g.bias.resize(specs_.size());
    Tensor grad = grad_output;
    for (size_t ri = specs_.size(); ri-- > 0;) {
        const LayerSpec& s = specs_[ri];
        const Tensor& in = trace.act[ri];
        const Tensor& out = trace.act[ri + 1];
        switch (s.kind) {
            case LayerSpec::Kind::Conv: {
                ConvGrads cg = conv2d_backward(in, weights_[ri], grad, s.stride);
                g.weights[ri] = std::move(cg.weights);
                g.bias[ri] = std::move(cg.bias);
                grad = std::move(cg.input);
                break;
            }
            case LayerSpec::Kind::Dense: {
                DenseGrads dg = dense_backward(in, weights_[ri], grad);
                g.weights[ri] = std::move(dg.weights);
                g.bias[ri] = std::move(dg.bias);
                grad = std::move(dg.input);
                break;
            }
            case LayerSpec::Kind::Relu:
                grad = relu_backward(in, grad);
                break;
            case LayerSpec::Kind::Sigmoid:
                grad = sigmoid_backward(out, grad);
                break;
            case LayerSpec::Kind::Upsample2x:
                grad = upsample2x_backward(grad);
                break;
            case LayerSpec::Kind::Flatten: {
                Tensor t(in.shape);
                t.data = grad.data;
                grad = std::move(t);
                break;
            }
            case LayerSpec::Kind::Reshape: {
                Tensor t(in.shape);
                t.data = grad.data;
                grad = std::move(t);
                break;
            }
        }
        check_finite(grad, ri);
    }
    return g;
}

std::vector<std::pair<double*, size_t>> Model::parameter_views() {
    std::vector<std::pair<double*, size_t>> v;
    for (size_t i = 0; i < specs_.size(); ++i) {
        if (weights_[i].size() == 0) continue;
        v.emplace_back(weights_[i].data.data(), weights_[i].size());
        v.emplace_back(biases_[i].data(), biases_[i].size());
    }
    return v;
}

std::vector<std::pair<const double*, size_t>> Model::parameter_views() const {
    std::vector<std::pair<const double*, size_t>> v;
    for (size_t i = 0; i < specs_.size(); ++i) {
        if (weights_[i].size() == 0) continue;
        v.emplace_back(weights_[i].data.data(), weights_[i].size());
        v.emplace_back(biases_[i].data(), biases_[i].size());
    }
    return v;
}

namespace {

constexpr char kModelMagic[4] = {'T', 'O', 'M', 'M'};
constexpr uint8_t kModelVersion = 1;

void put_u32le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32le(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

}  // namespace

void save_model(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("save_model: cannot open " + path);
    out.write(kModelMagic, 4);
    out.put(static_cast<char>(kModelVersion));
    put_u32le(out, static_cast<uint32_t>(model.input_h()));
    put_u32le(out, static_cast<uint32_t>(model.input_w()));
    const std::string& cfg = model.config_text();
    put_u32le(out, static_cast<uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

    uint32_t arrays = 0;
    for (const auto& [ptr, sz] : model.parameter_views()) {
        (void)ptr;
        (void)sz;
        ++arrays;
    }
    put_u32le(out, arrays);
    const auto& specs = model.specs();
    for (size_t i = 0; i < specs.size(); ++i) {
        const Tensor& w = model.weights()[i];
        if (w.size() == 0) continue;
        std::vector<uint32_t> dims(w.shape.begin(), w.shape.end());
        io::write_blob(out, dims, io::kDtypeF64, w.data.data(), w.size());
        const auto& b = model.biases()[i];
        io::write_blob(out, {static_cast<uint32_t>(b.size())}, io::kDtypeF64, b.data(), b.size());
    }
    out.flush();
    if (!out) throw DataError("save_model: I/O failure writing " + path);
}

Model load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_model: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kModelMagic, 4) != 0)
        throw DataError("load_model(" + path + "): bad magic, not a model file");
    int version = in.get();
    if (version != kModelVersion)
        throw DataError("load_model(" + path + "): unsupported version " + std::to_string(version));
    int in_h = static_cast<int>(get_u32le(in));
    int in_w = static_cast<int>(get_u32le(in));
    uint32_t cfg_len = get_u32le(in);
    std::string cfg(cfg_len, '\0');
    in.read(cfg.data(), cfg_len);
    if (!in) throw DataError("load_model(" + path + "): truncated config block");

    Model model(cfg, in_h, in_w, /*seed=*/0);
    uint32_t arrays = get_u32le(in);

    uint32_t idx = 0;
    for (size_t i = 0; i < model.specs().size(); ++i) {
        Tensor& w = model.weights()[i];
        if (w.size() == 0) continue;
        for (int part = 0; part < 2; ++part) {
            if (idx++ >= arrays)
                throw DataError("load_model(" + path + "): missing parameter arrays");
            std::vector<uint32_t> dims;
            uint8_t dtype;
            std::vector<double> vals;
            io::read_blob(in, "load_model(" + path + ") array " + std::to_string(idx), dims, dtype,
                          vals);
            if (dtype != io::kDtypeF64)
                throw DataError("load_model(" + path + "): parameter arrays must be f64");
            if (part == 0) {
                std::vector<uint32_t> want(w.shape.begin(), w.shape.end());
                if (dims != want)
                    throw DataError("load_model(" + path + "): shape mismatch for layer " +
                                    std::to_string(i + 1) + " weights");
                w.data = std::move(vals);
            } else {
                auto& b = model.biases()[i];
                if (dims.size() != 1 || dims[0] != b.size())
                    throw DataError("load_model(" + path + "): shape mismatch for layer " +
                                    std::to_string(i + 1) + " bias");
                b = std::move(vals);
            }
        }
    }
    if (idx != arrays)
        throw DataError("load_model(" + path + "): unexpected extra parameter arrays");
    return model;
}

}  // namespace spect
