#include "spect/dataset.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "spect/array_io.hpp"
#include "spect/projector.hpp"
#include "spect/rng.hpp"

namespace spect {

namespace {

constexpr char kManifestHeader[] = "spectlab-dataset v1";

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_manifest(const DatasetParams& p, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("write_manifest: cannot open " + path);
    out << kManifestHeader << "\n";
    out << "n = " << p.geom.n << "\n";
    out << "np = " << p.geom.np << "\n";
    out << "nr = " << p.geom.nr << "\n";
    out << "bin_width = " << fmt_double(p.geom.bin_width) << "\n";
    out << "angle_span = " << fmt_double(p.geom.angle_span) << "\n";
    out << "total_counts = " << fmt_double(p.calib.total_counts) << "\n";
    out << "noise = " << noise_name(p.level) << "\n";
    out << "shape_count_min = " << p.phantom.shape_count_min << "\n";
    out << "shape_count_max = " << p.phantom.shape_count_max << "\n";
    out << "seed = " << p.seed << "\n";
    out << "count = " << p.count << "\n";
    out.flush();
    if (!out) throw DataError("write_manifest: I/O failure writing " + path);
}

DatasetParams read_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("read_manifest: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != kManifestHeader)
        throw DataError("read_manifest(" + path + "): bad header line");
    std::map<std::string, std::string> kv;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto eq = line.find(" = ");
        if (eq == std::string::npos)
            throw DataError("read_manifest(" + path + "): bad line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw DataError("read_manifest(" + path + "): missing key '" + key + "'");
        return it->second;
    };
    DatasetParams p;
    p.geom.n = std::stoi(need("n"));
    p.geom.np = std::stoi(need("np"));
    p.geom.nr = std::stoi(need("nr"));
    p.geom.bin_width = std::stod(need("bin_width"));
    p.geom.angle_span = std::stod(need("angle_span"));
    p.calib.total_counts = std::stod(need("total_counts"));
    p.level = parse_noise_level(need("noise"));
    p.phantom.n = p.geom.n;
    p.phantom.shape_count_min = std::stoi(need("shape_count_min"));
    p.phantom.shape_count_max = std::stoi(need("shape_count_max"));
    p.seed = std::stoull(need("seed"));
    p.count = std::stoi(need("count"));
    return p;
}

DatasetItem make_item(const DatasetParams& p, const Projector& proj, int index) {
    PhantomSpec spec = p.phantom;
    spec.n = p.geom.n;
    Image ph = random_phantom(spec, derive_seed(p.seed, 2 * static_cast<uint64_t>(index)));
    Sinogram ideal = proj.forward_project(ph);
    Sinogram noisy = apply_poisson(ideal, p.level, p.calib,
                                   derive_seed(p.seed, 2 * static_cast<uint64_t>(index) + 1));
    return {std::move(ph.data), std::move(noisy.data)};
}

void generate_dataset(const DatasetParams& p, const std::string& out_dir) {
    if (p.count < 1) throw DataError("generate_dataset: count must be >= 1");
    p.geom.validate();
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "items");
    write_manifest(p, (fs::path(out_dir) / "manifest.txt").string());

    Projector proj(p.geom);
    for (int i = 0; i < p.count; ++i) {
        DatasetItem item = make_item(p, proj, i);
        // Values go to disk as f32; load_dataset reads the same bits back.
        Image ph(p.geom.n);
        ph.data = std::move(item.phantom);
        Sinogram sn(p.geom.np, p.geom.nr);
        sn.data = std::move(item.sino);
        std::string stem = (fs::path(out_dir) / "items" / std::to_string(i)).string();
        io::save_image(ph, stem + ".phantom");
        io::save_sinogram(sn, stem + ".sino");
    }
}

Dataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    Dataset ds;
    ds.params = read_manifest((fs::path(dir) / "manifest.txt").string());
    ds.items.reserve(static_cast<size_t>(ds.params.count));
    for (int i = 0; i < ds.params.count; ++i) {
        std::string stem = (fs::path(dir) / "items" / std::to_string(i)).string();
        Image ph = io::load_image(stem + ".phantom");
        Sinogram sn = io::load_sinogram(stem + ".sino");
        if (ph.n != ds.params.geom.n || sn.np != ds.params.geom.np || sn.nr != ds.params.geom.nr)
            throw DataError("load_dataset: item " + std::to_string(i) +
                            " does not match the manifest geometry");
        ds.items.push_back({std::move(ph.data), std::move(sn.data)});
    }
    return ds;
}

}  // namespace spect
