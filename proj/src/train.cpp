#include "spect/train.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "spect/rng.hpp"

namespace spect {

namespace {

struct Adam {
    double lr, beta1, beta2, eps;
    int64_t t = 0;
    std::vector<std::vector<double>> m, v;

    explicit Adam(const TrainConfig& cfg, const std::vector<std::pair<double*, size_t>>& params)
        : lr(cfg.lr), beta1(cfg.beta1), beta2(cfg.beta2), eps(cfg.adam_eps) {
        for (const auto& [ptr, sz] : params) {
            (void)ptr;
            m.emplace_back(sz, 0.0);
            v.emplace_back(sz, 0.0);
        }
    }

    void step(std::vector<std::pair<double*, size_t>>& params,
              const std::vector<std::pair<const double*, size_t>>& grads) {
        ++t;
        double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (size_t p = 0; p < params.size(); ++p) {
            double* x = params[p].first;
            const double* g = grads[p].first;
            double* mp = m[p].data();
            double* vp = v[p].data();
            size_t sz = params[p].second;
#pragma omp parallel for schedule(static)
            for (long long i = 0; i < static_cast<long long>(sz); ++i) {
                mp[i] = beta1 * mp[i] + (1.0 - beta1) * g[i];
                vp[i] = beta2 * vp[i] + (1.0 - beta2) * g[i] * g[i];
                double mhat = mp[i] / bc1;
                double vhat = vp[i] / bc2;
                x[i] -= lr * mhat / (std::sqrt(vhat) + eps);
            }
        }
    }
};

Tensor make_batch_input(const std::vector<TrainItem>& items, const std::vector<int>& idx,
                        size_t begin, size_t end, int h, int w) {
    Tensor t({static_cast<int>(end - begin), 1, h, w});
    for (size_t b = begin; b < end; ++b)
        std::copy(items[static_cast<size_t>(idx[b])].input.begin(),
                  items[static_cast<size_t>(idx[b])].input.end(),
                  t.data.begin() + static_cast<int64_t>(b - begin) * h * w);
    return t;
}

// Mean (1 - SSIM) over a batch; fills grad (same shape as out) when asked.
double batch_objective(const Tensor& out, const std::vector<TrainItem>& items,
                       const std::vector<int>& idx, size_t begin, Tensor* grad) {
    const int B = out.dim(0);
    const size_t px = out.size() / static_cast<size_t>(B);
    double loss = 0.0;
    if (grad) grad->data.assign(out.size(), 0.0);
    for (int b = 0; b < B; ++b) {
        const auto& target = items[static_cast<size_t>(idx[begin + static_cast<size_t>(b)])].target;
        std::span<const double> x(out.data.data() + static_cast<size_t>(b) * px, px);
        loss += 1.0 - ssim(x, target);
        if (grad) {
            std::vector<double> g = ssim_loss_grad(x, target);
            for (size_t i = 0; i < px; ++i)
                grad->data[static_cast<size_t>(b) * px + i] = g[i] / B;
        }
    }
    return loss / B;
}

double eval_loss(const Model& model, const std::vector<TrainItem>& items,
                 const std::vector<int>& idx, int batch) {
    double total = 0.0;
    size_t count = idx.size();
    for (size_t begin = 0; begin < count; begin += static_cast<size_t>(batch)) {
        size_t end = std::min(count, begin + static_cast<size_t>(batch));
        Tensor in = make_batch_input(items, idx, begin, end, model.input_h(), model.input_w());
        Tensor out = model.forward(in);
        total += batch_objective(out, items, idx, begin, nullptr) *
                 static_cast<double>(end - begin);
    }
    return total / static_cast<double>(count);
}

}  // namespace

double batch_loss(const Model& model, const std::vector<TrainItem>& items,
                  const std::vector<int>& indices, int batch) {
    return eval_loss(model, items, indices, batch);
}

TrainResult train(Model& model, const std::vector<TrainItem>& items, const TrainConfig& cfg,
                  std::ostream* progress) {
    if (items.empty()) throw DataError("train: empty dataset");
    if (cfg.batch < 1 || cfg.epochs < 1) throw DataError("train: bad batch/epochs");
    const size_t px_in = static_cast<size_t>(model.input_h()) * model.input_w();
    const size_t px_out = static_cast<size_t>(model.output_h()) * model.output_w();
    for (const auto& it : items)
        if (it.input.size() != px_in || it.target.size() != px_out)
            throw DataError("train: item shapes do not match the model");

    // Deterministic 90/10 split, then per-epoch batch order, from one stream.
    Pcg32 rng(cfg.seed);
    std::vector<int> perm(items.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    for (size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.bounded(static_cast<uint32_t>(i))]);
    size_t train_count = items.size() * 9 / 10;
    if (train_count == 0) train_count = items.size();  // tiny sets train on everything
    std::vector<int> train_idx(perm.begin(), perm.begin() + static_cast<int64_t>(train_count));
    std::vector<int> val_idx(perm.begin() + static_cast<int64_t>(train_count), perm.end());

    auto params = model.parameter_views();
    Adam adam(cfg, params);

    TrainResult result;
    std::vector<Tensor> best_w = model.weights();
    std::vector<std::vector<double>> best_b = model.biases();
    double best_val = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    Model::Trace trace;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t i = train_idx.size(); i > 1; --i)
            std::swap(train_idx[i - 1], train_idx[rng.bounded(static_cast<uint32_t>(i))]);

        double epoch_loss = 0.0;
        int batches = 0;
        for (size_t begin = 0; begin < train_idx.size(); begin += static_cast<size_t>(cfg.batch)) {
            size_t end = std::min(train_idx.size(), begin + static_cast<size_t>(cfg.batch));
            Tensor in = make_batch_input(items, train_idx, begin, end, model.input_h(),
                                         model.input_w());
            Tensor out;
            try {
                out = model.forward_train(in, trace);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches) + ")");
            }
            Tensor grad(out.shape);
            double loss = batch_objective(out, items, train_idx, begin, &grad);
            if (!std::isfinite(loss))
                throw NumericError("train: loss diverged at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batches));
            epoch_loss += loss;
            ++batches;
            Model::Gradients g = model.backward(trace, grad);
            std::vector<std::pair<const double*, size_t>> gview;
            for (size_t li = 0; li < g.weights.size(); ++li) {
                if (g.weights[li].size() == 0) continue;
                gview.emplace_back(g.weights[li].data.data(), g.weights[li].size());
                gview.emplace_back(g.bias[li].data(), g.bias[li].size());
            }
            adam.step(params, gview);
        }

        const std::vector<int>& eval_idx = val_idx.empty() ? train_idx : val_idx;
        double val = eval_loss(model, items, eval_idx, cfg.batch);
        result.epochs.push_back({epoch_loss / std::max(batches, 1), val});
        if (val < best_val) {
            best_val = val;
            best_epoch = epoch;
            best_w = model.weights();
            best_b = model.biases();
        }
        if (progress)
            (*progress) << "epoch " << epoch << " train_loss " << result.epochs.back().train_loss
                        << " val_loss " << val << "\n";
    }

    model.weights() = std::move(best_w);
    model.biases() = std::move(best_b);
    result.best_epoch = best_epoch;
    result.best_val = best_val;
    return result;
}

}  // namespace spect
