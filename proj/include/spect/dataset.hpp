#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spect/noise.hpp"
#include "spect/phantom.hpp"
#include "spect/types.hpp"

namespace spect {

// Everything needed to regenerate a dataset bit for bit. Serialized as the
// plain-text manifest; items live beside it as items/<index>.phantom and
// items/<index>.sino (f32 arrays). Item i uses phantom seed
// derive_seed(seed, 2i) and noise seed derive_seed(seed, 2i+1).
struct DatasetParams {
    ScanGeometry geom;
    CountCalibration calib;
    NoiseLevel level = NoiseLevel::High;
    PhantomSpec phantom;
    uint64_t seed = 0;
    int count = 0;
};

struct DatasetItem {
    std::vector<double> phantom;  // n*n
    std::vector<double> sino;     // np*nr, noisy counts
};

struct Dataset {
    DatasetParams params;
    std::vector<DatasetItem> items;
};

void write_manifest(const DatasetParams& p, const std::string& path);
DatasetParams read_manifest(const std::string& path);

// Generates phantoms + noisy sinograms under out_dir (created if missing).
void generate_dataset(const DatasetParams& p, const std::string& out_dir);

// Loads manifest + items; verifies the item files' shapes.
Dataset load_dataset(const std::string& dir);

// Generates one item in memory (the same function generate_dataset uses).
DatasetItem make_item(const DatasetParams& p, const class Projector& proj, int index);

}  // namespace spect
