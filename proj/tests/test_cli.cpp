// End-to-end checks of the spectlab binary: flags, exit codes, file outputs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "spect/array_io.hpp"
#include "spect/types.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string stderr_text;
};

RunResult run_cli(const std::string& args, const fs::path& scratch) {
    fs::path errfile = scratch / "stderr.txt";
    std::string cmd = std::string(SPECTLAB_BIN) + " " + args + " 2>" + errfile.string();
    int rc = std::system(cmd.c_str());
    std::ifstream in(errfile);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return {WEXITSTATUS(rc), text};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kTinyArch = R"(conv in=1 out=4 k=3 s=2
relu
flatten
dense in=192 out=64
relu
reshape c=4 h=4 w=4
upsample2x
conv in=4 out=4 k=3 s=1
relu
upsample2x
conv in=4 out=1 k=3 s=1
sigmoid
)";

const std::string kGeom = " --n 16 --np 8 --nr 24 ";

}  // namespace

TEST_CASE("cli: usage errors exit 2 with a machine-parsable prefix") {
    testutil::TempDir tmp("cli_usage");
    RunResult r = run_cli("recon --method warp --input nope.tomo --out x.tomo", tmp.path);
    CHECK(r.exit_code == 3);  // missing input file is a data error
    r = run_cli("generate", tmp.path);
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.rfind("error[usage]:", 0) == 0);
    r = run_cli("frobnicate", tmp.path);
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: cnnr without --model is a usage error") {
    testutil::TempDir tmp("cli_nomodel");
    spect::Sinogram s(8, 24, 1.0);
    spect::io::save_sinogram(s, tmp.file("s.tomo"));
    RunResult r =
        run_cli("recon --method cnnr --input " + tmp.file("s.tomo") + kGeom + "--out " +
                    tmp.file("o.tomo"),
                tmp.path);
    CHECK(r.exit_code == 2);
    CHECK(r.stderr_text.rfind("error[usage]:", 0) == 0);
}

TEST_CASE("cli: geometry mismatch is a data error") {
    testutil::TempDir tmp("cli_geom");
    spect::Sinogram s(8, 20, 1.0);
    spect::io::save_sinogram(s, tmp.file("s.tomo"));
    RunResult r = run_cli("recon --method fbp --input " + tmp.file("s.tomo") + kGeom + "--out " +
                              tmp.file("o.tomo"),
                          tmp.path);
    CHECK(r.exit_code == 3);
    CHECK(r.stderr_text.rfind("error[data]:", 0) == 0);
}

TEST_CASE("cli: generate twice with one seed gives identical trees") {
    testutil::TempDir tmp("cli_gen");
    std::string common = "generate" + kGeom + "--count 10 --seed 7 --noise high --out ";
    CHECK(run_cli(common + tmp.file("a"), tmp.path).exit_code == 0);
    CHECK(run_cli(common + tmp.file("b"), tmp.path).exit_code == 0);
    CHECK(slurp(fs::path(tmp.file("a")) / "manifest.txt") ==
          slurp(fs::path(tmp.file("b")) / "manifest.txt"));
    for (int i = 0; i < 10; ++i)
        for (const char* ext : {".phantom", ".sino"}) {
            auto fa = fs::path(tmp.file("a")) / "items" / (std::to_string(i) + ext);
            auto fb = fs::path(tmp.file("b")) / "items" / (std::to_string(i) + ext);
            REQUIRE(fs::exists(fa));
            CHECK(slurp(fa) == slurp(fb));
        }
    // dims match the flags
    auto arr = spect::io::read_array(
        (fs::path(tmp.file("a")) / "items" / "0.sino").string());
    CHECK(arr.dims == std::vector<uint32_t>{8, 24});
}

TEST_CASE("cli: high-noise counts are 10% of the noiseless baseline") {
    testutil::TempDir tmp("cli_ratio");
    std::string common = "generate" + kGeom + "--count 30 --seed 3 --out ";
    CHECK(run_cli(common + tmp.file("none") + " --noise none", tmp.path).exit_code == 0);
    CHECK(run_cli(common + tmp.file("high") + " --noise high", tmp.path).exit_code == 0);
    double total_none = 0.0, total_high = 0.0;
    for (int i = 0; i < 30; ++i) {
        auto a = spect::io::read_array(
            (fs::path(tmp.file("none")) / "items" / (std::to_string(i) + ".sino")).string());
        auto b = spect::io::read_array(
            (fs::path(tmp.file("high")) / "items" / (std::to_string(i) + ".sino")).string());
        for (float v : a.values) total_none += v;
        for (float v : b.values) total_high += v;
    }
    CHECK(total_high / total_none == doctest::Approx(0.10).epsilon(0.1));
    CHECK(std::abs(total_high / total_none - 0.10) < 0.01);
}

TEST_CASE("cli: fbp of a zero sinogram is the zero image") {
    testutil::TempDir tmp("cli_zero");
    spect::Sinogram s(8, 24);
    spect::io::save_sinogram(s, tmp.file("z.tomo"));
    RunResult r = run_cli("recon --method fbp --input " + tmp.file("z.tomo") + kGeom + "--out " +
                              tmp.file("o.tomo") + " --pgm " + tmp.file("o.pgm"),
                          tmp.path);
    CHECK(r.exit_code == 0);
    auto img = spect::io::read_array(tmp.file("o.tomo"));
    CHECK(img.dims == std::vector<uint32_t>{16, 16});
    for (float v : img.values) CHECK(v == 0.0f);
    CHECK(fs::exists(tmp.file("o.pgm")));
}

TEST_CASE("cli: osem with one subset equals mlem") {
    testutil::TempDir tmp("cli_osem1");
    CHECK(run_cli("generate" + kGeom + "--count 1 --seed 5 --noise low --out " + tmp.file("d"),
                  tmp.path)
              .exit_code == 0);
    std::string sino = (fs::path(tmp.file("d")) / "items" / "0.sino").string();
    CHECK(run_cli("recon --method mlem --iterations 10 --input " + sino + kGeom + "--out " +
                      tmp.file("m.tomo"),
                  tmp.path)
              .exit_code == 0);
    CHECK(run_cli("recon --method osem --subsets 1 --iterations 10 --input " + sino + kGeom +
                      "--out " + tmp.file("o.tomo"),
                  tmp.path)
              .exit_code == 0);
    auto m = spect::io::read_array(tmp.file("m.tomo"));
    auto o = spect::io::read_array(tmp.file("o.tomo"));
    REQUIRE(m.values.size() == o.values.size());
    for (size_t i = 0; i < m.values.size(); ++i) {
        double denom = std::max({static_cast<double>(std::abs(m.values[i])),
                                 static_cast<double>(std::abs(o.values[i])), 1e-12});
        CHECK(std::abs(m.values[i] - o.values[i]) / denom < 1e-6);
    }
}

TEST_CASE("cli: train writes a model and a per-epoch loss csv, deterministically") {
    testutil::TempDir tmp("cli_train");
    std::ofstream(tmp.file("tiny.cfg")) << kTinyArch;
    CHECK(run_cli("generate" + kGeom + "--count 40 --seed 9 --noise medium --out " + tmp.file("d"),
                  tmp.path)
              .exit_code == 0);
    std::string train_cmd = "train --dataset " + tmp.file("d") + " --config " +
                            tmp.file("tiny.cfg") + " --epochs 3 --seed 4 --batch 8 --out ";
    CHECK(run_cli(train_cmd + tmp.file("m1.model"), tmp.path).exit_code == 0);
    CHECK(run_cli(train_cmd + tmp.file("m2.model"), tmp.path).exit_code == 0);

    std::string csv1 = slurp(tmp.file("m1.model.losses.csv"));
    std::string csv2 = slurp(tmp.file("m2.model.losses.csv"));
    CHECK(csv1 == csv2);
    int rows = 0;
    for (char c : csv1)
        if (c == '\n') ++rows;
    CHECK(rows == 4);  // header + 3 epochs
    CHECK(slurp(tmp.file("m1.model")) == slurp(tmp.file("m2.model")));

    // the trained model reconstructs through the recon subcommand
    std::string sino = (fs::path(tmp.file("d")) / "items" / "0.sino").string();
    RunResult r = run_cli("recon --method cnnr --model " + tmp.file("m1.model") + " --input " +
                              sino + kGeom + "--out " + tmp.file("c.tomo"),
                          tmp.path);
    CHECK(r.exit_code == 0);
    auto img = spect::io::read_array(tmp.file("c.tomo"));
    CHECK(img.dims == std::vector<uint32_t>{16, 16});
}

TEST_CASE("cli: bench grid without cnnr writes reports and images") {
    testutil::TempDir tmp("cli_bench");
    RunResult r = run_cli("bench --test-phantom shepp-logan "
                          "--n 32 --np 16 --nr 48 --methods fbp,mlem,osem --levels low,high "
                          "--subsets 4 --seed 11 --out " +
                              tmp.file("rep"),
                          tmp.path);
    CHECK(r.exit_code == 0);
    std::string csv = slurp(fs::path(tmp.file("rep")) / "report.csv");
    int rows = 0;
    for (char c : csv)
        if (c == '\n') ++rows;
    CHECK(rows == 1 + 3 * 2 * 4);  // header + methods x levels x metrics
    CHECK(csv.rfind("method,noise_level,metric,value", 0) == 0);
    CHECK(fs::exists(fs::path(tmp.file("rep")) / "report.txt"));
    CHECK(fs::exists(fs::path(tmp.file("rep")) / "images" / "phantom.pgm"));
    CHECK(fs::exists(fs::path(tmp.file("rep")) / "images" / "fbp_low.pgm"));
    CHECK(fs::exists(fs::path(tmp.file("rep")) / "images" / "mlem_high.pgm"));

    // missing cnnr model aborts with the cell id
    RunResult bad = run_cli("bench --test-phantom shepp-logan --n 32 --np 16 --nr 48 "
                            "--methods cnnr --levels low --models " +
                                tmp.file("nomodels") + " --seed 11 --out " + tmp.file("rep2"),
                            tmp.path);
    CHECK(bad.exit_code == 3);
    CHECK(bad.stderr_text.find("cnnr/low") != std::string::npos);
}
