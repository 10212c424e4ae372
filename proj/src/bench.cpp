#include "spect/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "spect/array_io.hpp"
#include "spect/em.hpp"
#include "spect/model.hpp"
#include "spect/projector.hpp"
#include "spect/rng.hpp"

namespace spect {

namespace {

namespace fs = std::filesystem;

int level_order(NoiseLevel l) {
    switch (l) {
        case NoiseLevel::None: return 0;
        case NoiseLevel::Low: return 1;
        case NoiseLevel::Medium: return 2;
        default: return 3;
    }
}

struct MeanMetrics {
    double mse = 0.0, mae = 0.0, ssim = 0.0, pcc = 0.0;
    int count = 0;

    void add(const MetricReport& r) {
        mse += r.mse;
        mae += r.mae;
        ssim += r.ssim;
        pcc += r.pcc;
        ++count;
    }
    void finish() {
        mse /= count;
        mae /= count;
        ssim /= count;
        pcc /= count;
    }
};

Tensor sino_to_input(const Sinogram& sino) {
    // Model input layout is (1, 1, nr, np); min-max normalized counts.
    Tensor t({1, 1, sino.nr, sino.np});
    double lo = sino.data[0], hi = sino.data[0];
    for (double v : sino.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double inv = hi > lo ? 1.0 / (hi - lo) : 0.0;
    for (int b = 0; b < sino.nr; ++b)
        for (int a = 0; a < sino.np; ++a)
            t.data[static_cast<size_t>(b) * sino.np + a] = (sino.at(a, b) - lo) * inv;
    return t;
}

Image tensor_to_image(const Tensor& t) {
    Image img(t.dim(2));
    std::copy(t.data.begin(), t.data.end(), img.data.begin());
    return img;
}

}  // namespace

std::string render_csv(const std::vector<BenchCell>& cells) {
    std::vector<BenchCell> sorted = cells;
    std::sort(sorted.begin(), sorted.end(), [](const BenchCell& a, const BenchCell& b) {
        if (a.method != b.method) return a.method < b.method;
        return level_order(a.level) < level_order(b.level);
    });
    std::string out = "method,noise_level,metric,value\n";
    char buf[128];
    for (const auto& c : sorted) {
        const std::pair<const char*, double> metrics[4] = {
            {"mae", c.mae}, {"mse", c.mse}, {"pcc", c.pcc}, {"ssim", c.ssim}};
        for (const auto& [name, value] : metrics) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.6f\n", c.method.c_str(),
                          noise_name(c.level), name, value);
            out += buf;
        }
    }
    return out;
}

std::string render_table(const std::vector<BenchCell>& cells,
                         const std::vector<NoiseLevel>& levels) {
    std::map<std::pair<std::string, int>, const BenchCell*> index;
    std::vector<std::string> methods;
    for (const auto& c : cells) {
        index[{c.method, level_order(c.level)}] = &c;
        if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
            methods.push_back(c.method);
    }
    // Classic comparison order, proposed method last.
    std::vector<std::string> order = {"fbp", "osem", "mlem", "cnnr"};
    std::stable_sort(methods.begin(), methods.end(), [&](const std::string& a, const std::string& b) {
        auto pa = std::find(order.begin(), order.end(), a) - order.begin();
        auto pb = std::find(order.begin(), order.end(), b) - order.begin();
        return pa < pb;
    });

    char buf[256];
    std::string out = "Method";
    out.insert(out.end(), 6, ' ');
    for (NoiseLevel l : levels) {
        std::snprintf(buf, sizeof(buf), " | %-31s", noise_name(l));
        out += buf;
    }
    out += "\n";
    out.insert(out.end(), 12, ' ');
    for (size_t i = 0; i < levels.size(); ++i) out += " |   MSE     MAE    SSIM     PCC ";
    out += "\n";
    out += std::string(12 + levels.size() * 34, '-') + "\n";
    for (const auto& m : methods) {
        std::snprintf(buf, sizeof(buf), "%-12s", m.c_str());
        out += buf;
        for (NoiseLevel l : levels) {
            auto it = index.find({m, level_order(l)});
            if (it == index.end()) {
                out += " |" + std::string(32, ' ');
                continue;
            }
            const BenchCell& c = *it->second;
            std::snprintf(buf, sizeof(buf), " | %.3f  %.3f  %.3f  %6.3f ", c.mse, c.mae, c.ssim,
                          c.pcc);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::vector<BenchCell> run_bench(const BenchConfig& cfg) {
    cfg.geom.validate();
    if (cfg.levels.empty() || cfg.methods.empty())
        throw UsageError("bench: need at least one level and one method");
    const bool shepp = cfg.source == BenchConfig::Source::SheppLogan;
    const int count = shepp ? 1 : cfg.count;
    if (count < 1) throw UsageError("bench: count must be >= 1");

    Projector proj(cfg.geom);

    // Truth phantoms and their ideal sinograms.
    std::vector<Image> truths;
    std::vector<Sinogram> ideals;
    truths.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        PhantomSpec spec = cfg.phantom;
        spec.n = cfg.geom.n;
        truths.push_back(shepp ? shepp_logan(cfg.geom.n)
                               : random_phantom(spec, derive_seed(cfg.seed, 2ULL * i)));
        ideals.push_back(proj.forward_project(truths.back()));
    }

    fs::create_directories(fs::path(cfg.out_dir) / "images");
    io::export_pgm(truths.front(), (fs::path(cfg.out_dir) / "images" / "phantom.pgm").string());

    std::vector<BenchCell> cells;
    for (size_t li = 0; li < cfg.levels.size(); ++li) {
        NoiseLevel level = cfg.levels[li];

        std::vector<Sinogram> noisy;
        noisy.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) {
            uint64_t noise_seed =
                derive_seed(cfg.seed, (static_cast<uint64_t>(level_order(level)) << 32) |
                                          static_cast<uint64_t>(i));
            noisy.push_back(apply_poisson(ideals[static_cast<size_t>(i)], level, cfg.calib,
                                          noise_seed));
        }

        std::optional<Model> cnnr_model;
        if (std::find(cfg.methods.begin(), cfg.methods.end(), "cnnr") != cfg.methods.end()) {
            fs::path mp = fs::path(cfg.models_dir) /
                          ("cnnr_" + std::string(noise_name(level)) + ".model");
            if (!fs::exists(mp))
                throw DataError("bench cell cnnr/" + std::string(noise_name(level)) +
                                ": missing model " + mp.string());
            cnnr_model.emplace(load_model(mp.string()));
            if (cnnr_model->input_h() != cfg.geom.nr || cnnr_model->input_w() != cfg.geom.np ||
                cnnr_model->output_h() != cfg.geom.n)
                throw DataError("bench cell cnnr/" + std::string(noise_name(level)) +
                                ": model dims do not match the geometry");
        }

        for (const std::string& method : cfg.methods) {
            const std::string cell_id = method + "/" + noise_name(level);
            try {
                BenchCell cell;
                cell.method = method;
                cell.level = level;
                Image sample_recon;

                if (method == "fbp") {
                    MeanMetrics mm;
                    for (int i = 0; i < count; ++i) {
                        Image rec = fbp(noisy[static_cast<size_t>(i)], cfg.geom, cfg.fbp);
                        mm.add(evaluate(rec, truths[static_cast<size_t>(i)]));
                        if (i == 0) sample_recon = std::move(rec);
                    }
                    mm.finish();
                    cell = {method, level, mm.mse, mm.mae, mm.ssim, mm.pcc, 0};
                } else if (method == "cnnr") {
                    MeanMetrics mm;
                    for (int i = 0; i < count; ++i) {
                        Tensor in = sino_to_input(noisy[static_cast<size_t>(i)]);
                        Image rec = tensor_to_image(cnnr_model->forward(in));
                        mm.add(evaluate(rec, truths[static_cast<size_t>(i)]));
                        if (i == 0) sample_recon = std::move(rec);
                    }
                    mm.finish();
                    cell = {method, level, mm.mse, mm.mae, mm.ssim, mm.pcc, 0};
                } else if (method == "mlem" || method == "osem") {
                    const bool is_osem = method == "osem";
                    const std::vector<int>& checks =
                        is_osem ? cfg.osem_checkpoints : cfg.mlem_checkpoints;
                    EmConfig ec;
                    ec.iterations = checks.back();
                    ec.subsets = is_osem ? cfg.osem_subsets : 1;
                    std::vector<MeanMetrics> per_check(checks.size());
                    std::vector<std::vector<double>> first_item_snapshots(checks.size());
                    for (int i = 0; i < count; ++i) {
                        auto on_iter = [&](int it, const std::vector<double>& x) {
                            auto pos = std::find(checks.begin(), checks.end(), it);
                            if (pos == checks.end()) return;
                            size_t ci = static_cast<size_t>(pos - checks.begin());
                            Image rec(cfg.geom.n);
                            rec.data = x;
                            per_check[ci].add(evaluate(rec, truths[static_cast<size_t>(i)]));
                            if (i == 0) first_item_snapshots[ci] = x;
                        };
                        osem(noisy[static_cast<size_t>(i)], proj, ec, on_iter);
                    }
                    size_t best = 0;
                    for (auto& mm : per_check) mm.finish();
                    for (size_t ci = 1; ci < per_check.size(); ++ci)
                        if (per_check[ci].ssim > per_check[best].ssim) best = ci;
                    cell = {method,              level,
                            per_check[best].mse, per_check[best].mae,
                            per_check[best].ssim, per_check[best].pcc,
                            checks[best]};
                    sample_recon = Image(cfg.geom.n);
                    sample_recon.data = first_item_snapshots[best];
                } else {
                    throw UsageError("unknown method '" + method + "'");
                }

                io::export_pgm(sample_recon, (fs::path(cfg.out_dir) / "images" /
                                              (method + "_" + noise_name(level) + ".pgm"))
                                                 .string());
                cells.push_back(cell);
            } catch (const UsageError&) {
                throw;
            } catch (const std::exception& e) {
                throw DataError("bench cell " + cell_id + ": " + e.what());
            }
        }
    }

    std::sort(cells.begin(), cells.end(), [](const BenchCell& a, const BenchCell& b) {
        if (a.method != b.method) return a.method < b.method;
        return level_order(a.level) < level_order(b.level);
    });

    std::ofstream csv(fs::path(cfg.out_dir) / "report.csv", std::ios::binary);
    csv << render_csv(cells);
    std::ofstream txt(fs::path(cfg.out_dir) / "report.txt", std::ios::binary);
    txt << render_table(cells, cfg.levels);
    return cells;
}

}  // namespace spect
