// spectlab: dataset generation, reconstruction, training and benchmarking
// for the SPECT reconstruction laboratory.
//
// Exit codes: 0 ok, 2 usage error, 3 data error, 4 numeric failure.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spect/array_io.hpp"
#include "spect/bench.hpp"
#include "spect/dataset.hpp"
#include "spect/em.hpp"
#include "spect/fbp.hpp"
#include "spect/model.hpp"
#include "spect/projector.hpp"
#include "spect/train.hpp"

namespace fs = std::filesystem;
using namespace spect;

namespace {

struct GeometryFlags {
    int n = 32, np = 32, nr = 48;
    double bin_width = 1.0;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--n", n, "image side (pixels)");
        cmd->add_option("--np", np, "projection angles");
        cmd->add_option("--nr", nr, "detector bins per angle");
        cmd->add_option("--bin-width", bin_width, "bin width in pixel units");
    }
    ScanGeometry geometry() const { return {n, np, nr, bin_width, 2.0 * M_PI}; }
};

double default_counts(int n, double flag_value) {
    return flag_value > 0.0 ? flag_value : CountCalibration::for_grid(n).total_counts;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

std::vector<TrainItem> to_train_items(const Dataset& ds) {
    std::vector<TrainItem> items;
    items.reserve(ds.items.size());
    for (const auto& it : ds.items) {
        TrainItem ti;
        // (np, nr) angle-major counts -> (nr, np) model layout, min-max normalized
        const int np = ds.params.geom.np, nr = ds.params.geom.nr;
        double lo = it.sino[0], hi = it.sino[0];
        for (double v : it.sino) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double inv = hi > lo ? 1.0 / (hi - lo) : 0.0;
        ti.input.resize(it.sino.size());
        for (int b = 0; b < nr; ++b)
            for (int a = 0; a < np; ++a)
                ti.input[static_cast<size_t>(b) * np + a] =
                    (it.sino[static_cast<size_t>(a) * nr + b] - lo) * inv;
        ti.target = it.phantom;
        items.push_back(std::move(ti));
    }
    return items;
}

int cmd_generate(int n, int np, int nr, double bin_width, int count, uint64_t seed,
                 const std::string& noise, double total_counts, int shapes_min, int shapes_max,
                 const std::string& out) {
    DatasetParams p;
    p.geom = {n, np, nr, bin_width, 2.0 * M_PI};
    p.calib.total_counts = default_counts(n, total_counts);
    p.level = parse_noise_level(noise);
    p.phantom = {n, shapes_min, shapes_max};
    p.seed = seed;
    p.count = count;
    generate_dataset(p, out);
    std::cerr << "generated " << count << " items under " << out << "\n";
    return 0;
}

int cmd_recon(const std::string& method, const std::string& input, const GeometryFlags& gf,
              const std::string& model_path, const std::string& out, const std::string& pgm,
              int iterations, int subsets, const std::string& filter) {
    Sinogram sino = io::load_sinogram(input);
    ScanGeometry geom = gf.geometry();
    if (!sino.matches(geom))
        throw DataError("geometry mismatch: sinogram is " + std::to_string(sino.np) + "x" +
                        std::to_string(sino.nr) + ", flags say " + std::to_string(geom.np) + "x" +
                        std::to_string(geom.nr));

    Image rec;
    if (method == "fbp") {
        FbpConfig cfg;
        if (filter == "hann")
            cfg.filter = FbpConfig::Filter::Hann;
        else if (filter != "ramlak")
            throw UsageError("unknown filter '" + filter + "' (expected ramlak|hann)");
        rec = fbp(sino, geom, cfg);
    } else if (method == "mlem" || method == "osem") {
        Projector proj(geom);
        EmConfig cfg;
        cfg.iterations = iterations > 0 ? iterations : (method == "mlem" ? 100 : 12);
        cfg.subsets = method == "mlem" ? 1 : subsets;
        rec = osem(sino, proj, cfg).image;
    } else if (method == "cnnr") {
        if (model_path.empty()) throw UsageError("--method cnnr requires --model");
        Model model = load_model(model_path);
        if (model.input_h() != geom.nr || model.input_w() != geom.np)
            throw DataError("model input " + std::to_string(model.input_h()) + "x" +
                            std::to_string(model.input_w()) + " does not match sinogram " +
                            std::to_string(geom.nr) + "x" + std::to_string(geom.np));
        Tensor in({1, 1, geom.nr, geom.np});
        double lo = sino.data[0], hi = sino.data[0];
        for (double v : sino.data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        double inv = hi > lo ? 1.0 / (hi - lo) : 0.0;
        for (int b = 0; b < geom.nr; ++b)
            for (int a = 0; a < geom.np; ++a)
                in.data[static_cast<size_t>(b) * geom.np + a] = (sino.at(a, b) - lo) * inv;
        Tensor out_t = model.forward(in);
        rec = Image(model.output_h());
        std::copy(out_t.data.begin(), out_t.data.end(), rec.data.begin());
    } else {
        throw UsageError("unknown method '" + method + "'");
    }

    io::save_image(rec, out);
    if (!pgm.empty()) io::export_pgm(rec, pgm);
    std::cerr << "wrote " << out << "\n";
    return 0;
}

int cmd_train(const std::string& dataset_dir, const std::string& config_path, int epochs,
              uint64_t seed, double lr, int batch, const std::string& out,
              const std::string& csv_path) {
    Dataset ds = load_dataset(dataset_dir);
    std::string cfg_text = read_text_file(config_path);
    Model model(cfg_text, ds.params.geom.nr, ds.params.geom.np, derive_seed(seed, 0));
    if (model.output_h() != ds.params.geom.n || model.output_w() != ds.params.geom.n)
        throw DataError("model output " + std::to_string(model.output_h()) + "x" +
                        std::to_string(model.output_w()) + " does not match phantom side " +
                        std::to_string(ds.params.geom.n));

    TrainConfig tc;
    tc.epochs = epochs;
    tc.seed = seed;
    tc.lr = lr;
    tc.batch = batch;
    std::vector<TrainItem> items = to_train_items(ds);
    TrainResult tr = train(model, items, tc, &std::cerr);

    save_model(model, out);
    std::string csv = csv_path.empty() ? out + ".losses.csv" : csv_path;
    std::ofstream cout_f(csv, std::ios::binary);
    if (!cout_f) throw DataError("cannot open " + csv);
    cout_f << "epoch,train_loss,val_loss\n";
    char buf[128];
    for (size_t e = 0; e < tr.epochs.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9f,%.9f\n", e, tr.epochs[e].train_loss,
                      tr.epochs[e].val_loss);
        cout_f << buf;
    }
    std::cerr << "best epoch " << tr.best_epoch << " val_loss " << tr.best_val << "\n";
    return 0;
}

int cmd_bench(const std::string& source, int count, uint64_t seed, const GeometryFlags& gf,
              double total_counts, const std::string& levels, const std::string& methods,
              const std::string& models_dir, const std::string& out_dir, int subsets) {
    BenchConfig cfg;
    cfg.geom = gf.geometry();
    cfg.calib.total_counts = default_counts(cfg.geom.n, total_counts);
    cfg.count = count;
    cfg.seed = seed;
    cfg.models_dir = models_dir;
    cfg.out_dir = out_dir;
    cfg.osem_subsets = subsets;
    cfg.phantom.n = cfg.geom.n;

    if (source == "shepp-logan")
        cfg.source = BenchConfig::Source::SheppLogan;
    else if (source == "dataset")
        cfg.source = BenchConfig::Source::HeldOut;
    else
        throw UsageError("unknown --test-phantom '" + source + "' (expected shepp-logan|dataset)");

    cfg.levels.clear();
    std::string lv = levels == "all" ? "low,medium,high" : levels;
    for (size_t pos = 0; pos < lv.size();) {
        auto comma = lv.find(',', pos);
        if (comma == std::string::npos) comma = lv.size();
        cfg.levels.push_back(parse_noise_level(lv.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    cfg.methods.clear();
    std::string mt = methods == "all" ? "fbp,osem,mlem,cnnr" : methods;
    for (size_t pos = 0; pos < mt.size();) {
        auto comma = mt.find(',', pos);
        if (comma == std::string::npos) comma = mt.size();
        cfg.methods.push_back(mt.substr(pos, comma - pos));
        pos = comma + 1;
    }

    auto cells = run_bench(cfg);
    std::cout << render_table(cells, cfg.levels);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SPECT reconstruction laboratory"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a phantom/sinogram dataset");
    GeometryFlags gen_geom;
    gen_geom.add_to(gen);
    int gen_count = 100;
    uint64_t gen_seed = 0;
    std::string gen_noise = "high", gen_out;
    double gen_counts = 0.0;
    int gen_smin = 1, gen_smax = 8;
    gen->add_option("--count", gen_count, "number of items");
    gen->add_option("--seed", gen_seed, "dataset seed");
    gen->add_option("--noise", gen_noise, "none|low|med|high");
    gen->add_option("--total-counts", gen_counts, "expected counts at scale 1 (default by n)");
    gen->add_option("--shapes-min", gen_smin, "min shapes per phantom");
    gen->add_option("--shapes-max", gen_smax, "max shapes per phantom");
    gen->add_option("--out", gen_out, "output directory")->required();

    // recon
    auto* rec = app.add_subcommand("recon", "reconstruct one sinogram file");
    GeometryFlags rec_geom;
    rec_geom.add_to(rec);
    std::string rec_method, rec_input, rec_model, rec_out, rec_pgm, rec_filter = "ramlak";
    int rec_iters = 0, rec_subsets = 8;
    rec->add_option("--method", rec_method, "fbp|mlem|osem|cnnr")->required();
    rec->add_option("--input", rec_input, "input sinogram (.tomo array)")->required();
    rec->add_option("--model", rec_model, "model file (cnnr)");
    rec->add_option("--out", rec_out, "output image (.tomo array)")->required();
    rec->add_option("--pgm", rec_pgm, "also write a PGM preview");
    rec->add_option("--iterations", rec_iters, "EM iterations (default 100 mlem / 12 osem)");
    rec->add_option("--subsets", rec_subsets, "OSEM subsets (default 8)");
    rec->add_option("--filter", rec_filter, "FBP filter: ramlak|hann");

    // train
    auto* trn = app.add_subcommand("train", "train a CNNR model on a dataset");
    std::string trn_dataset, trn_config, trn_out, trn_csv;
    int trn_epochs = 30, trn_batch = 32;
    uint64_t trn_seed = 0;
    double trn_lr = 1e-3;
    trn->add_option("--dataset", trn_dataset, "dataset directory")->required();
    trn->add_option("--config", trn_config, "architecture config file")->required();
    trn->add_option("--epochs", trn_epochs, "training epochs");
    trn->add_option("--seed", trn_seed, "training seed");
    trn->add_option("--lr", trn_lr, "Adam learning rate");
    trn->add_option("--batch", trn_batch, "batch size");
    trn->add_option("--out", trn_out, "output model file")->required();
    trn->add_option("--loss-csv", trn_csv, "per-epoch loss CSV (default <out>.losses.csv)");

    // bench
    auto* ben = app.add_subcommand("bench", "run the method x noise-level benchmark grid");
    GeometryFlags ben_geom;
    ben_geom.add_to(ben);
    std::string ben_source = "dataset", ben_levels = "all", ben_methods = "all";
    std::string ben_models, ben_out;
    int ben_count = 100, ben_subsets = 8;
    uint64_t ben_seed = 42;
    double ben_counts = 0.0;
    ben->add_option("--test-phantom", ben_source, "shepp-logan|dataset");
    ben->add_option("--count", ben_count, "held-out phantoms (dataset source)");
    ben->add_option("--seed", ben_seed, "evaluation seed (keep distinct from training seeds)");
    ben->add_option("--total-counts", ben_counts, "expected counts at scale 1 (default by n)");
    ben->add_option("--levels", ben_levels, "all or comma list of low,medium,high");
    ben->add_option("--methods", ben_methods, "all or comma list of fbp,mlem,osem,cnnr");
    ben->add_option("--models", ben_models, "directory with cnnr_<level>.model files");
    ben->add_option("--subsets", ben_subsets, "OSEM subsets");
    ben->add_option("--out", ben_out, "report output directory")->required();

    try {
        app.parse(argc, argv);
        if (*gen)
            return cmd_generate(gen_geom.n, gen_geom.np, gen_geom.nr, gen_geom.bin_width,
                                gen_count, gen_seed, gen_noise, gen_counts, gen_smin, gen_smax,
                                gen_out);
        if (*rec)
            return cmd_recon(rec_method, rec_input, rec_geom, rec_model, rec_out, rec_pgm,
                             rec_iters, rec_subsets, rec_filter);
        if (*trn)
            return cmd_train(trn_dataset, trn_config, trn_epochs, trn_seed, trn_lr, trn_batch,
                             trn_out, trn_csv);
        if (*ben)
            return cmd_bench(ben_source, ben_count, ben_seed, ben_geom, ben_counts, ben_levels,
                             ben_methods, ben_models, ben_out, ben_subsets);
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error[usage]: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error[usage]: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error[numeric]: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "error[data]: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error[data]: " << e.what() << "\n";
        return 3;
    }
}
