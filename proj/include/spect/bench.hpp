#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spect/fbp.hpp"
#include "spect/metrics.hpp"
#include "spect/noise.hpp"
#include "spect/phantom.hpp"
#include "spect/types.hpp"

namespace spect {

// Benchmark grid: methods x noise levels, each cell evaluated against the
// truth phantom(s) and reported as the mean of the four metrics. MLEM and
// OSEM sweep iteration checkpoints and report the checkpoint with the best
// mean SSIM, to avoid penalizing the baselines with an arbitrary stopping
// rule (their operating points are otherwise free parameters).
struct BenchConfig {
    enum class Source { SheppLogan, HeldOut };

    ScanGeometry geom;
    CountCalibration calib = CountCalibration::for_grid(32);
    std::vector<NoiseLevel> levels = {NoiseLevel::Low, NoiseLevel::Medium, NoiseLevel::High};
    std::vector<std::string> methods = {"fbp", "osem", "mlem", "cnnr"};
    Source source = Source::HeldOut;
    int count = 100;   // held-out phantoms (SheppLogan source always uses 1)
    uint64_t seed = 42;
    PhantomSpec phantom;
    std::string models_dir;  // expects cnnr_<level>.model for each level
    std::string out_dir;
    int osem_subsets = 8;
    FbpConfig fbp;
    std::vector<int> mlem_checkpoints = {1, 2, 3, 5, 8, 12, 20, 30, 50, 75, 100};
    std::vector<int> osem_checkpoints = {1, 2, 3, 4, 6, 8, 12};
};

struct BenchCell {
    std::string method;
    NoiseLevel level;
    double mse, mae, ssim, pcc;
    int best_iterations = 0;  // swept methods only
};

// Runs the grid and writes report.csv, report.txt and images/*.pgm under
// cfg.out_dir. Returns the cells (sorted by method name, then level).
std::vector<BenchCell> run_bench(const BenchConfig& cfg);

std::string render_csv(const std::vector<BenchCell>& cells);
std::string render_table(const std::vector<BenchCell>& cells,
                         const std::vector<NoiseLevel>& levels);

}  // namespace spect
