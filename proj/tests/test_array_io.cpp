#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "spect/array_io.hpp"
#include "spect/rng.hpp"
#include "test_util.hpp"

using namespace spect;

TEST_CASE("array file: zero payload layout") {
    testutil::TempDir tmp("array_zero");
    std::string path = tmp.file("z.tomo");
    io::write_array(path, {2, 2}, {0.f, 0.f, 0.f, 0.f});
    // 4 magic + 1 version + 1 dtype + 1 ndim + 2*4 dims + 4*4 payload
    CHECK(std::filesystem::file_size(path) == 31);
    auto a = io::read_array(path);
    CHECK(a.dims == std::vector<uint32_t>{2, 2});
    for (float v : a.values) CHECK(v == 0.0f);
}

TEST_CASE("array file: 192x128 byte count") {
    testutil::TempDir tmp("array_size");
    std::string path = tmp.file("s.tomo");
    std::vector<float> vals(192 * 128, 1.5f);
    io::write_array(path, {192, 128}, vals);
    CHECK(std::filesystem::file_size(path) == 98319);  // 4+1+1+1+8 + 192*128*4
}

TEST_CASE("array file: round-trip is bit-exact for random f32") {
    testutil::TempDir tmp("array_rt");
    Pcg32 rng(11);
    std::vector<float> vals(128 * 128);
    for (float& v : vals) v = static_cast<float>(rng.uniform(-10.0, 10.0));
    std::string path = tmp.file("rt.tomo");
    io::write_array(path, {128, 128}, vals);
    auto a = io::read_array(path);
    REQUIRE(a.values.size() == vals.size());
    for (size_t i = 0; i < vals.size(); ++i) CHECK(a.values[i] == vals[i]);
}

TEST_CASE("array file: small round-trip values") {
    testutil::TempDir tmp("array_small");
    std::string path = tmp.file("v.tomo");
    io::write_array(path, {3}, {1.f, 2.f, 3.f});
    auto a = io::read_array(path);
    CHECK(a.dims == std::vector<uint32_t>{3});
    CHECK(a.values == std::vector<float>{1.f, 2.f, 3.f});
}

TEST_CASE("array file: error cases are distinct") {
    testutil::TempDir tmp("array_err");
    std::string path = tmp.file("bad.tomo");

    SUBCASE("bad magic") {
        std::ofstream out(path, std::ios::binary);
        out << "XXXX";
        out.put(1);
        out.put(1);
        out.put(1);
        out.write("\x03\x00\x00\x00", 4);
        out.close();
        CHECK_THROWS_WITH_AS(io::read_array(path), doctest::Contains("bad magic"), DataError);
    }
    SUBCASE("unsupported version") {
        std::ofstream out(path, std::ios::binary);
        out << "TOMO";
        out.put(9);
        out.put(1);
        out.put(1);
        out.write("\x01\x00\x00\x00", 4);
        out.write("\x00\x00\x80\x3f", 4);
        out.close();
        CHECK_THROWS_WITH_AS(io::read_array(path), doctest::Contains("unsupported version"),
                             DataError);
    }
    SUBCASE("truncated payload names byte counts") {
        io::write_array(path, {4}, {1.f, 2.f, 3.f, 4.f});
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 6);
        CHECK_THROWS_WITH_AS(io::read_array(path), doctest::Contains("expected 16 bytes, got 10"),
                             DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(io::read_array(tmp.file("nope.tomo")), DataError);
    }
    SUBCASE("dims/values mismatch") {
        CHECK_THROWS_AS(io::write_array(path, {3}, {1.f, 2.f}), DataError);
        CHECK_THROWS_AS(io::write_array(path, {}, {}), DataError);
    }
}

TEST_CASE("pgm: hand-normalized 2x2 example") {
    testutil::TempDir tmp("pgm");
    std::string path = tmp.file("t.pgm");
    double vals[4] = {0.0, 1.0, 0.5, 0.25};
    io::export_pgm(vals, 2, 2, path);
    std::ifstream in(path, std::ios::binary);
    std::string header;
    std::getline(in, header);
    CHECK(header == "P5");
    int w, h, maxval;
    in >> w >> h >> maxval;
    in.get();
    CHECK(w == 2);
    CHECK(h == 2);
    CHECK(maxval == 255);
    unsigned char px[4];
    in.read(reinterpret_cast<char*>(px), 4);
    CHECK(px[0] == 0);
    CHECK(px[1] == 255);
    CHECK(px[2] == 128);
    CHECK(px[3] == 64);
}

TEST_CASE("pgm: constant image maps to mid-gray") {
    testutil::TempDir tmp("pgm_const");
    std::string path = tmp.file("c.pgm");
    Image img(4, 7.25);
    io::export_pgm(img, path);
    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::getline(in, line);
    char c;
    while (in.get(c)) CHECK(static_cast<unsigned char>(c) == 128);
}

TEST_CASE("pgm: invariant under positive affine rescale") {
    testutil::TempDir tmp("pgm_affine");
    Pcg32 rng(3);
    Image img(8);
    testutil::fill_uniform(img.data, rng);
    Image scaled(8);
    for (size_t i = 0; i < img.data.size(); ++i) scaled.data[i] = 3.7 * img.data[i] - 11.0;
    io::export_pgm(img, tmp.file("a.pgm"));
    io::export_pgm(scaled, tmp.file("b.pgm"));
    std::ifstream fa(tmp.file("a.pgm"), std::ios::binary);
    std::ifstream fb(tmp.file("b.pgm"), std::ios::binary);
    std::string sa((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string sb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    CHECK(sa == sb);
}
