#include <doctest.h>

#include <cmath>

#include "spect/metrics.hpp"
#include "spect/rng.hpp"
#include "test_util.hpp"

using namespace spect;

TEST_CASE("normalize: range mapping and conventions") {
    Image img(2);
    img.data = {2.0, 4.0, 3.0, 2.5};
    Image n = normalize(img);
    CHECK(n.data[0] == 0.0);
    CHECK(n.data[1] == 1.0);
    CHECK(n.data[2] == 0.5);

    Image c(2, 3.0);
    Image nc = normalize(c);
    for (double v : nc.data) CHECK(v == 0.0);

    Image again = normalize(n);
    for (size_t i = 0; i < n.data.size(); ++i) CHECK(again.data[i] == n.data[i]);
}

TEST_CASE("mse/mae: identities and hand values") {
    Image x(2), y(2);
    x.data = {0.0, 0.0, 1.0, 1.0};
    y.data = {0.0, 0.0, 1.0, 1.0};
    CHECK(mse(x, y) == 0.0);
    CHECK(mae(x, y) == 0.0);

    Image a(1), b(1);
    a.n = 1;
    a.data = {0.0};
    b.n = 1;
    b.data = {1.0};
    CHECK(mse(a, b) == 1.0);

    Image p(2), q(2);
    p.data = {0.0, 0.0, 0.0, 0.0};
    q.data = {1.0, 0.0, 1.0, 0.0};
    CHECK(mse(p, q) == 0.5);
    CHECK(mae(p, q) == 0.5);
}

TEST_CASE("mae^2 <= mse over random pairs") {
    Pcg32 rng(1);
    for (int t = 0; t < 50; ++t) {
        Image x(6), y(6);
        testutil::fill_uniform(x.data, rng);
        testutil::fill_uniform(y.data, rng);
        double m = mae(x, y);
        CHECK(m * m <= mse(x, y) + 1e-15);
    }
}

TEST_CASE("pcc: affine relations and degeneracy") {
    Pcg32 rng(2);
    Image x(8);
    testutil::fill_uniform(x.data, rng);
    CHECK(pcc(x, x) == doctest::Approx(1.0).epsilon(1e-12));

    Image up(8), down(8);
    for (size_t i = 0; i < x.data.size(); ++i) {
        up.data[i] = 2.5 * x.data[i] + 3.0;
        down.data[i] = -0.5 * x.data[i] + 1.0;
    }
    CHECK(pcc(x, up) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pcc(x, down) == doctest::Approx(-1.0).epsilon(1e-12));

    Image c(8, 5.0);
    bool degenerate = false;
    CHECK(pcc(x, c, &degenerate) == 0.0);
    CHECK(degenerate);
}

TEST_CASE("pcc: independent images are nearly uncorrelated") {
    Pcg32 rng(3);
    int ok = 0;
    for (int t = 0; t < 100; ++t) {
        Image x(64), y(64);
        testutil::fill_uniform(x.data, rng);
        testutil::fill_uniform(y.data, rng);
        if (std::abs(pcc(x, y)) < 0.05) ++ok;
    }
    CHECK(ok >= 95);
}

TEST_CASE("evaluate: perfect reconstruction and affine invariance") {
    Pcg32 rng(4);
    Image truth(16);
    testutil::fill_uniform(truth.data, rng);
    MetricReport perfect = evaluate(truth, truth);
    CHECK(perfect.mse == 0.0);
    CHECK(perfect.mae == 0.0);
    CHECK(perfect.ssim == 1.0);
    CHECK(perfect.pcc == doctest::Approx(1.0).epsilon(1e-12));

    Image recon(16);
    testutil::fill_uniform(recon.data, rng);
    Image scaled(16);
    for (size_t i = 0; i < recon.data.size(); ++i) scaled.data[i] = 7.0 * recon.data[i] - 2.0;
    MetricReport a = evaluate(recon, truth);
    MetricReport b = evaluate(scaled, truth);
    CHECK(a.mse == doctest::Approx(b.mse).epsilon(1e-9));
    CHECK(a.mae == doctest::Approx(b.mae).epsilon(1e-9));
    CHECK(a.ssim == doctest::Approx(b.ssim).epsilon(1e-9));
    CHECK(a.pcc == doctest::Approx(b.pcc).epsilon(1e-9));
}

TEST_CASE("evaluate: finite range-valid outputs for arbitrary finite inputs") {
    Pcg32 rng(5);
    for (int t = 0; t < 20; ++t) {
        Image x(12), y(12);
        testutil::fill_uniform(x.data, rng, -50.0, 50.0);
        testutil::fill_uniform(y.data, rng, 0.0, 1e6);
        MetricReport r = evaluate(x, y);
        CHECK(std::isfinite(r.mse));
        CHECK(std::isfinite(r.mae));
        CHECK(r.mse >= 0.0);
        CHECK(r.mae >= 0.0);
        CHECK(r.ssim > -1.0);
        CHECK(r.ssim <= 1.0);
        CHECK(r.pcc >= -1.0);
        CHECK(r.pcc <= 1.0);
    }
    Image x(4), y(5);
    CHECK_THROWS_AS(evaluate(x, y), DataError);
}
