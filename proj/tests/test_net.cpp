#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gdl/model.hpp"
#include "gdl/net.hpp"
#include "oracles.hpp"

using namespace gdl;

namespace {

ArchConfig small_arch(int k, int m, int stride, int p, int s, bool adaptive, TieConfig tie) {
    ArchConfig a;
    a.layers = k;
    a.subbands = m;
    a.stride = stride;
    a.filter_size = p;
    a.mog_order = s;
    a.adaptive = adaptive;
    a.tied = tie;
    return a;
}

}  // namespace

TEST_CASE("soft_threshold dead zone and shrinkage") {
    Subband z(1, 1, 5);
    const double vals[5] = {-2.0, -0.5, 0.0, 0.5, 2.0};
    for (int j = 0; j < 5; ++j) z.at(0, 0, j) = vals[j];
    Subband out = soft_threshold(z, {1.0});
    const double want[5] = {-1.0, 0.0, 0.0, 0.0, 1.0};
    for (int j = 0; j < 5; ++j) CHECK(out.at(0, 0, j) == want[j]);
}

TEST_CASE("soft_threshold applies per-channel thresholds") {
    Subband z(2, 1, 2);
    z.at(0, 0, 0) = 3.0;
    z.at(0, 0, 1) = -3.0;
    z.at(1, 0, 0) = 3.0;
    z.at(1, 0, 1) = 0.25;
    Subband out = soft_threshold(z, {1.0, 0.5});
    CHECK(out.at(0, 0, 0) == 2.0);
    CHECK(out.at(0, 0, 1) == -2.0);
    CHECK(out.at(1, 0, 0) == 2.5);
    CHECK(out.at(1, 0, 1) == 0.0);
    CHECK_THROWS(soft_threshold(z, {1.0, -0.1}));  // negative threshold
    CHECK_THROWS(soft_threshold(z, {1.0}));        // tau size mismatch
}

TEST_CASE("soft_threshold is non-expansive and monotone in tau") {
    CounterRng rng(31, StreamKind::Test, 20);
    Subband a = oracle::random_subband(2, 4, 4, rng);
    Subband b = oracle::random_subband(2, 4, 4, rng);
    Subband sa = soft_threshold(a, {0.3, 0.7}), sb = soft_threshold(b, {0.3, 0.7});
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(std::fabs(sa.data[i] - sb.data[i]) <= std::fabs(a.data[i] - b.data[i]) + 1e-15);
    Subband lo = soft_threshold(a, {0.1, 0.1}), hi = soft_threshold(a, {0.4, 0.4});
    for (size_t i = 0; i < a.data.size(); ++i)
        CHECK(std::fabs(hi.data[i]) <= std::fabs(lo.data[i]) + 1e-15);
}

TEST_CASE("reflect_pad_to_multiple mirrors the bottom and right edges") {
    Image x(3, 5);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) x.at(i, j) = 10.0 * i + j;
    Image p = reflect_pad_to_multiple(x, 4);
    REQUIRE(p.height == 4);
    REQUIRE(p.width == 8);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 5; ++j) CHECK(p.at(i, j) == x.at(i, j));
    CHECK(p.at(3, 0) == x.at(2, 0));  // row 3 mirrors row 2H-1-3 = 2
    CHECK(p.at(0, 5) == x.at(0, 4));  // col 5 mirrors col 2W-1-5 = 4
    CHECK(p.at(0, 6) == x.at(0, 3));
    CHECK(p.at(0, 7) == x.at(0, 2));
    CHECK(p.at(3, 7) == x.at(2, 2));
    // already a multiple: untouched
    Image q = reflect_pad_to_multiple(p, 4);
    CHECK(q.data == p.data);
    // required pad larger than the image
    Image tiny(2, 2);
    CHECK_THROWS(reflect_pad_to_multiple(tiny, 8));
}

TEST_CASE("crop undoes padding") {
    CounterRng rng(32, StreamKind::Test, 21);
    Image x = oracle::random_image(5, 7, rng);
    Image back = crop(reflect_pad_to_multiple(x, 4), 5, 7);
    CHECK(back.data == x.data);
}

TEST_CASE("forward matches the naive unrolled reference") {
    CounterRng seeds(33, StreamKind::Test, 22);
    struct Case {
        int k, m, stride, p, s;
        bool adaptive;
        bool tied;
        int h, w;
    };
    const Case cases[] = {
        {1, 2, 1, 3, 1, false, false, 8, 8},
        {2, 3, 1, 5, 1, false, false, 12, 10},
        {3, 4, 2, 5, 1, false, false, 16, 12},
        {4, 8, 2, 7, 1, false, false, 16, 16},
        {3, 4, 2, 5, 2, true, false, 12, 16},
        {4, 6, 4, 7, 2, true, true, 16, 16},
        {2, 5, 1, 7, 3, true, true, 9, 11},
    };
    uint64_t seed = 1000;
    for (const auto& c : cases) {
        ArchConfig arch = small_arch(c.k, c.m, c.stride, c.p, c.s, c.adaptive,
                                     c.tied ? tie_all() : tie_none());
        ModelParams params = init_model(arch, ++seed);
        // move thresholds off the init default so the mask pattern is varied
        for (int k = 0; k < (arch.tied.thresholds ? 1 : arch.layers); ++k)
            for (int m = 0; m < arch.subbands; ++m)
                params.values[params.layout.tau0(k, m)] = 0.005 + 0.002 * m;
        Image y = oracle::random_image(c.h, c.w, seeds);
        RealizedModel banks = realize_model(params);
        Image got = forward(params, banks, y, 25.0, nullptr);
        Image want = oracle::naive_forward(params, y, 25.0);
        REQUIRE(got.same_shape(want));
        CHECK(oracle::max_abs_diff(got.data, want.data) < 1e-12);
    }
}

TEST_CASE("zero input produces exactly zero output") {
    uint64_t seed = 50;
    for (int stride : {1, 2, 4}) {
        for (bool adaptive : {false, true}) {
            ArchConfig arch = small_arch(3, 4, stride, 5, 2, adaptive,
                                         adaptive ? tie_all() : tie_none());
            ModelParams params = init_model(arch, ++seed);
            Image y(8, 8);
            RealizedModel banks = realize_model(params);
            Image out = forward(params, banks, y, 25.0, nullptr);
            for (double v : out.data) CHECK(v == 0.0);
            Image dn = denoise(params, Image(7, 9), 25.0);
            for (double v : dn.data) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("single layer with zero threshold is D A^T y") {
    ArchConfig arch = small_arch(1, 3, 2, 5, 1, false, tie_none());
    ModelParams params = init_model(arch, 77);
    for (int m = 0; m < arch.subbands; ++m) params.values[params.layout.tau0(0, m)] = 0.0;
    CounterRng rng(34, StreamKind::Test, 23);
    Image y = oracle::random_image(12, 8, rng);
    RealizedModel banks = realize_model(params);
    Image got = forward(params, banks, y, 0.0, nullptr);
    Subband code = oracle::naive_analysis(y, banks.analysis[0], arch.stride);
    Image want = oracle::naive_synthesis(code, banks.dictionary, arch.stride);
    CHECK(oracle::max_abs_diff(got.data, want.data) < 1e-12);
}

TEST_CASE("layer_thresholds composes tau0 and tau1") {
    ArchConfig arch = small_arch(2, 3, 1, 3, 1, true, tie_none());
    ModelParams params = init_model(arch, 5);
    params.values[params.layout.tau0(1, 2)] = 0.01;
    params.values[params.layout.tau1(1, 2)] = 1.0;
    auto tau = layer_thresholds(params, 1, 25.0);
    CHECK(tau[2] == doctest::Approx(0.01 + 25.0 / 255.0).epsilon(1e-15));
    auto tau0 = layer_thresholds(params, 1, 0.0);
    CHECK(tau0[2] == doctest::Approx(0.01).epsilon(1e-15));
    CHECK_THROWS(layer_thresholds(params, 1, -1.0));

    ArchConfig plain = small_arch(2, 3, 1, 3, 1, false, tie_none());
    ModelParams pp = init_model(plain, 5);
    pp.values[pp.layout.tau0(0, 1)] = 0.02;
    CHECK(layer_thresholds(pp, 0, 10.0)[1] == 0.02);
    CHECK(layer_thresholds(pp, 0, 200.0)[1] == 0.02);  // sigma has no effect

    ArchConfig tied = small_arch(3, 2, 1, 3, 1, false, tie_all());
    ModelParams tp = init_model(tied, 6);
    tp.values[tp.layout.tau0(0, 0)] = 0.125;
    CHECK(layer_thresholds(tp, 2, 25.0)[0] == 0.125);  // shared storage
}

TEST_CASE("denoise equals forward on stride-divisible input and pads otherwise") {
    ArchConfig arch = small_arch(2, 4, 2, 5, 1, false, tie_none());
    ModelParams params = init_model(arch, 9);
    CounterRng rng(35, StreamKind::Test, 24);
    Image even = oracle::random_image(8, 10, rng);
    RealizedModel banks = realize_model(params);
    Image f = forward(params, banks, even, 25.0, nullptr);
    Image d = denoise(params, even, 25.0);
    CHECK(f.data == d.data);

    Image odd = oracle::random_image(7, 9, rng);
    CHECK_THROWS(forward(params, banks, odd, 25.0, nullptr));
    Image dn = denoise(params, odd, 25.0);
    CHECK(dn.height == 7);
    CHECK(dn.width == 9);
    Image padded = reflect_pad_to_multiple(odd, arch.stride);
    Image via = crop(forward(params, banks, padded, 25.0, nullptr), 7, 9);
    CHECK(dn.data == via.data);
}

TEST_CASE("forward fills a complete replay cache") {
    ArchConfig arch = small_arch(3, 4, 2, 5, 1, true, tie_none());
    ModelParams params = init_model(arch, 11);
    CounterRng rng(36, StreamKind::Test, 25);
    Image y = oracle::random_image(8, 8, rng);
    RealizedModel banks = realize_model(params);
    ForwardCache cache;
    Image xhat = forward(params, banks, y, 17.5, &cache);
    REQUIRE(cache.code.size() == 4);
    REQUIRE(cache.pre.size() == 3);
    REQUIRE(cache.resid.size() == 3);
    REQUIRE(cache.taus.size() == 3);
    for (double v : cache.code[0].data) CHECK(v == 0.0);
    CHECK(cache.param_snapshot == params.values);
    CHECK(cache.sigma == 17.5);
    for (int k = 0; k < 3; ++k) {
        CHECK(cache.taus[k] == layer_thresholds(params, k, 17.5));
        // the cached iterate is the soft threshold of the cached preactivation
        Subband st = soft_threshold(cache.pre[k], cache.taus[k]);
        CHECK(st.data == cache.code[k + 1].data);
    }
    // xhat is the dictionary synthesis of the last iterate
    Image syn = synthesis_conv(cache.code.back(), cache.banks.dictionary, arch.stride);
    CHECK(xhat.data == syn.data);
}

TEST_CASE("validate_arch rejects malformed architectures") {
    ArchConfig ok = small_arch(2, 4, 2, 5, 1, false, tie_none());
    CHECK_NOTHROW(validate_arch(ok));
    ArchConfig bad = ok;
    bad.layers = 0;
    CHECK_THROWS(validate_arch(bad));
    bad = ok;
    bad.filter_size = 4;  // even
    CHECK_THROWS(validate_arch(bad));
    bad = ok;
    bad.stride = 3;
    CHECK_THROWS(validate_arch(bad));
    bad = ok;
    bad.subbands = 0;
    CHECK_THROWS(validate_arch(bad));
    bad = ok;
    bad.mog_order = 0;
    CHECK_THROWS(validate_arch(bad));
}
