#include <doctest.h>

#include <cmath>
#include <fstream>

#include "spect/model.hpp"
#include "spect/rng.hpp"
#include "spect/ssim.hpp"
#include "test_util.hpp"

using namespace spect;

namespace {

const char* kTinyConfig = R"(# tiny encoder-decoder used by the gradient suite
conv in=1 out=2 k=3 s=2
relu
conv in=2 out=2 k=3 s=1
relu
flatten
dense in=24 out=16
relu
reshape c=1 h=4 w=4
conv in=1 out=2 k=3 s=1
relu
conv in=2 out=1 k=3 s=1
sigmoid
)";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config parser: desk-style config round trips through validation") {
    std::string cfg = read_file(std::string(SPECT_CONFIG_DIR) + "/cnnr_desk.cfg");
    auto specs = parse_model_config(cfg);
    auto shapes = validate_shapes(specs, 48, 32);
    CHECK(shapes.back().c == 1);
    CHECK(shapes.back().h == 32);
    CHECK(shapes.back().w == 32);
}

TEST_CASE("config parser: paper-scale config composes to 128x128 with a 2048 bottleneck") {
    std::string cfg = read_file(std::string(SPECT_CONFIG_DIR) + "/cnnr_paper.cfg");
    auto specs = parse_model_config(cfg);

    int convs = 0, denses = 0;
    for (const auto& s : specs) {
        if (s.kind == LayerSpec::Kind::Conv) ++convs;
        if (s.kind == LayerSpec::Kind::Dense) ++denses;
    }
    CHECK(convs == 12 + 17);
    CHECK(denses == 3);

    auto shapes = validate_shapes(specs, 192, 128);
    CHECK(shapes.back().c == 1);
    CHECK(shapes.back().h == 128);
    CHECK(shapes.back().w == 128);

    // the last dense layer is the 2048-feature bottleneck
    int last_dense_out = 0;
    for (const auto& s : specs)
        if (s.kind == LayerSpec::Kind::Dense) last_dense_out = s.out_dim;
    CHECK(last_dense_out == 2048);
}

TEST_CASE("config parser: errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_model_config("conv in=1 out=2 k=3 s=1\nwat\n"),
                         doctest::Contains("line 2"), DataError);
    CHECK_THROWS_WITH_AS(parse_model_config("conv in=1 out=2 k=3\n"),
                         doctest::Contains("missing key s"), DataError);
    CHECK_THROWS_WITH_AS(parse_model_config("conv in=1 out=2 k=3 s=1 pad=9\n"),
                         doctest::Contains("unknown key 'pad'"), DataError);
    CHECK_THROWS_WITH_AS(parse_model_config("dense in=x out=2\n"), doctest::Contains("bad integer"),
                         DataError);
    CHECK_THROWS_AS(parse_model_config("# nothing\n"), DataError);
}

TEST_CASE("shape validation rejects inconsistent chains") {
    CHECK_THROWS_WITH_AS(
        validate_shapes(parse_model_config("conv in=2 out=2 k=3 s=1\n"), 8, 8),
        doctest::Contains("expects in=2"), DataError);
    CHECK_THROWS_WITH_AS(validate_shapes(parse_model_config("dense in=4 out=2\n"), 8, 8),
                         doctest::Contains("flat"), DataError);
    CHECK_THROWS_WITH_AS(
        validate_shapes(parse_model_config("flatten\nreshape c=2 h=2 w=2\n"), 8, 8),
        doctest::Contains("reshape"), DataError);
}

TEST_CASE("model: parameter count follows the config arithmetic") {
    Model m(kTinyConfig, 8, 6, 7);
    // conv(1->2,k3)=20, conv(2->2,k3)=38, dense(24->16)=400, conv(1->2,k3)=20,
    // conv(2->1,k3)=19
    CHECK(m.parameter_count() == 20 + 38 + 400 + 20 + 19);
    CHECK(m.output_h() == 4);
    CHECK(m.output_w() == 4);
}

TEST_CASE("model: forward is deterministic and shape-checked") {
    Model m(kTinyConfig, 8, 6, 42);
    Pcg32 rng(1);
    Tensor in({2, 1, 8, 6});
    testutil::fill_uniform(in.data, rng);
    Tensor a = m.forward(in);
    Tensor b = m.forward(in);
    CHECK(a.shape == std::vector<int>{2, 1, 4, 4});
    CHECK(a.data == b.data);
    for (double v : a.data) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_THROWS_AS(m.forward(Tensor({1, 1, 8, 7})), DataError);
}

TEST_CASE("model: seeded init differs across seeds, repeats within a seed") {
    Model a(kTinyConfig, 8, 6, 1), b(kTinyConfig, 8, 6, 1), c(kTinyConfig, 8, 6, 2);
    CHECK(a.weights()[0].data == b.weights()[0].data);
    CHECK(a.weights()[0].data != c.weights()[0].data);
}

TEST_CASE("model: NaN in flight aborts with the layer index") {
    Model m(kTinyConfig, 8, 6, 3);
    m.weights()[0].data[0] = std::nan("");
    Tensor in({1, 1, 8, 6});
    in.data.assign(in.data.size(), 0.5);
    CHECK_THROWS_WITH_AS(m.forward(in), doctest::Contains("after layer 1"), NumericError);
}

TEST_CASE("model: end-to-end parameter gradients match finite differences") {
    // seeds chosen so no relu input sits within the FD step of the kink
    Model m(kTinyConfig, 8, 6, 2);
    Pcg32 rng(4);
    Tensor in({1, 1, 8, 6});
    testutil::fill_uniform(in.data, rng);
    std::vector<double> target(16);
    testutil::fill_uniform(target, rng);

    Model::Trace trace;
    Tensor out = m.forward_train(in, trace);
    Tensor grad(out.shape);
    grad.data = ssim_loss_grad(out.data, target);
    Model::Gradients g = m.backward(trace, grad);

    auto loss = [&] { return 1.0 - ssim(m.forward(in).data, target); };
    for (size_t li = 0; li < m.specs().size(); ++li) {
        if (m.weights()[li].size() == 0) continue;
        auto fd_w = testutil::fd_grad(loss, m.weights()[li].data.data(), m.weights()[li].size());
        CHECK(testutil::max_rel_err(fd_w, g.weights[li].data) < 1e-3);
        auto fd_b = testutil::fd_grad(loss, m.biases()[li].data(), m.biases()[li].size());
        CHECK(testutil::max_rel_err(fd_b, g.bias[li]) < 1e-3);
    }
}

TEST_CASE("model: save/load round trip reproduces forward bit-exactly") {
    testutil::TempDir tmp("model_rt");
    Model m(kTinyConfig, 8, 6, 13);
    Pcg32 rng(6);
    Tensor in({3, 1, 8, 6});
    testutil::fill_uniform(in.data, rng);
    Tensor before = m.forward(in);

    std::string path = tmp.file("m.model");
    save_model(m, path);
    Model loaded = load_model(path);
    CHECK(loaded.parameter_count() == m.parameter_count());
    CHECK(loaded.config_text() == m.config_text());
    Tensor after = loaded.forward(in);
    CHECK(before.data == after.data);
}

TEST_CASE("model: container with mismatched shapes is rejected") {
    testutil::TempDir tmp("model_bad");
    Model small("conv in=1 out=1 k=3 s=1\nsigmoid\n", 4, 4, 1);
    Model big("conv in=1 out=2 k=3 s=1\nrelu\nconv in=2 out=1 k=3 s=1\nsigmoid\n", 4, 4, 1);
    std::string p_small = tmp.file("small.model");
    std::string p_big = tmp.file("big.model");
    save_model(small, p_small);
    save_model(big, p_big);

    // splice: big header + config replaced by small's -> shapes disagree
    std::string small_bytes = read_file(p_small);
    std::string big_bytes = read_file(p_big);
    // both files start: magic(4) version(1) in_h(4) in_w(4) cfg_len(4) cfg...
    uint32_t small_cfg_len = static_cast<uint8_t>(small_bytes[13]) |
                             (static_cast<uint8_t>(small_bytes[14]) << 8) |
                             (static_cast<uint8_t>(small_bytes[15]) << 16) |
                             (static_cast<uint8_t>(small_bytes[16]) << 24);
    uint32_t big_cfg_len = static_cast<uint8_t>(big_bytes[13]) |
                           (static_cast<uint8_t>(big_bytes[14]) << 8) |
                           (static_cast<uint8_t>(big_bytes[15]) << 16) |
                           (static_cast<uint8_t>(big_bytes[16]) << 24);
    std::string spliced = small_bytes.substr(0, 17 + small_cfg_len) +
                          big_bytes.substr(17 + big_cfg_len);
    std::string p_spliced = tmp.file("spliced.model");
    std::ofstream out(p_spliced, std::ios::binary);
    out << spliced;
    out.close();
    CHECK_THROWS_WITH_AS(load_model(p_spliced), doctest::Contains("mismatch"), DataError);
}
