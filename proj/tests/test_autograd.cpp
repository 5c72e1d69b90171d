#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gdl/autograd.hpp"
#include "gdl/gradcheck.hpp"
#include "gdl/optimizer.hpp"
#include "oracles.hpp"

using namespace gdl;

namespace {

ArchConfig arch_of(int k, int m, int stride, int p, int s, bool adaptive, TieConfig tie) {
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

double loss_at(const ModelParams& params, const Image& y, const Image& target, double sigma) {
    RealizedModel banks = realize_model(params);
    Image xhat = forward(params, banks, y, sigma, nullptr);
    return mse_loss(xhat, target);
}

}  // namespace

TEST_CASE("mse_loss is the sum of squared differences") {
    Image a(1, 3), b(1, 3);
    a.at(0, 0) = 1.0;
    a.at(0, 1) = -2.0;
    a.at(0, 2) = 0.5;
    b.at(0, 0) = 0.0;
    b.at(0, 1) = 1.0;
    b.at(0, 2) = 0.5;
    CHECK(mse_loss(a, b) == doctest::Approx(1.0 + 9.0 + 0.0).epsilon(1e-15));
    CHECK(mse_loss(a, a) == 0.0);
    Image g = mse_loss_grad(a, b, 0.25);
    CHECK(g.at(0, 0) == doctest::Approx(2.0 * 0.25 * 1.0));
    CHECK(g.at(0, 1) == doctest::Approx(2.0 * 0.25 * -3.0));
    CHECK(g.at(0, 2) == 0.0);
    Image c(2, 2);
    CHECK_THROWS(mse_loss(a, c));
}

TEST_CASE("backward of a zero upstream gradient is zero") {
    ArchConfig arch = arch_of(2, 3, 2, 5, 1, true, tie_none());
    ModelParams params = init_model(arch, 21);
    CounterRng rng(40, StreamKind::Test, 30);
    Image y = oracle::random_image(8, 8, rng);
    RealizedModel banks = realize_model(params);
    ForwardCache cache;
    forward(params, banks, y, 25.0, &cache);
    GradientSet g = backward(params, cache, Image(8, 8));
    REQUIRE(g.size() == params.values.size());
    for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("backward matches finite differences on sampled coordinates") {
    // independent FD loop, not the gradcheck harness
    ArchConfig arch = arch_of(2, 3, 2, 5, 1, true, tie_none());
    ModelParams params = init_model(arch, 22);
    CounterRng rng(41, StreamKind::Test, 31);
    Image y = oracle::random_image(12, 12, rng);
    Image target = oracle::random_image(12, 12, rng);
    const double sigma = 20.0;

    RealizedModel banks = realize_model(params);
    ForwardCache cache;
    Image xhat = forward(params, banks, y, sigma, &cache);
    GradientSet g = backward(params, cache, mse_loss_grad(xhat, target, 1.0));

    const double h = 1e-6;
    for (size_t i = 0; i < params.values.size(); i += 3) {
        ModelParams up = params, dn = params;
        up.values[i] += h;
        dn.values[i] -= h;
        const double fd = (loss_at(up, y, target, sigma) - loss_at(dn, y, target, sigma)) / (2 * h);
        CHECK_MESSAGE(fd_coord_pass(g[i], fd, 1e-5, 2e-6), "coordinate ", i, " analytic ", g[i],
                      " fd ", fd);
    }
}

TEST_CASE("gradcheck passes across architecture variants") {
    GradCheckOptions opt;
    opt.image_size = 16;
    struct V {
        ArchConfig arch;
        uint64_t seed;
    };
    const V variants[] = {
        {arch_of(2, 4, 1, 5, 1, false, tie_none()), 1},
        {arch_of(3, 3, 2, 5, 2, true, tie_none()), 2},
        {arch_of(2, 3, 2, 7, 1, true, tie_all()), 3},
        {arch_of(3, 2, 4, 5, 1, false, tie_all()), 4},
    };
    for (const auto& v : variants) {
        GradCheckReport rep = gradcheck(v.arch, v.seed, opt);
        CHECK_MESSAGE(rep.pass, "worst score ", rep.worst_score, " at coordinate ",
                      rep.worst_coord);
        CHECK(rep.coords == static_cast<int>(count_params(v.arch)));
    }
    // partially tied: only alpha shared
    TieConfig only_alpha;
    only_alpha.alpha = true;
    GradCheckReport rep = gradcheck(arch_of(3, 2, 2, 5, 1, false, only_alpha), 5, opt);
    CHECK(rep.pass);
    CHECK(rep.checked_ties);
    CHECK(rep.tie_sum_err < 1e-10);
}

TEST_CASE("gradcheck refuses oversized architectures") {
    GradCheckOptions opt;
    opt.budget = 100;
    CHECK_THROWS(gradcheck(arch_of(10, 32, 2, 7, 1, false, tie_none()), 1, opt));
}

TEST_CASE("tied gradients are the sum of the untied per-layer gradients") {
    const int K = 3;
    ArchConfig tied_arch = arch_of(K, 3, 2, 5, 2, true, tie_all());
    ArchConfig untied_arch = tied_arch;
    untied_arch.tied = tie_none();

    ModelParams tied = init_model(tied_arch, 31);
    // clone the tied values into an untied layout: every layer gets the same
    // bank, so both models realize identical filters and forward passes
    ModelParams untied = init_model(untied_arch, 31);
    for (int k = 0; k < K; ++k) {
        store_bank_spec(untied, Bank::Analysis, k, bank_spec(tied, Bank::Analysis, k));
        store_bank_spec(untied, Bank::Synthesis, k, bank_spec(tied, Bank::Synthesis, k));
        for (int m = 0; m < 3; ++m) {
            untied.values[untied.layout.tau0(k, m)] = tied.values[tied.layout.tau0(k, m)];
            untied.values[untied.layout.tau1(k, m)] = tied.values[tied.layout.tau1(k, m)];
        }
    }
    store_bank_spec(untied, Bank::Dictionary, 0, bank_spec(tied, Bank::Dictionary, 0));

    CounterRng rng(42, StreamKind::Test, 32);
    Image y = oracle::random_image(8, 8, rng);
    Image target = oracle::random_image(8, 8, rng);

    RealizedModel tb = realize_model(tied), ub = realize_model(untied);
    ForwardCache tc, uc;
    Image tx = forward(tied, tb, y, 25.0, &tc);
    Image ux = forward(untied, ub, y, 25.0, &uc);
    REQUIRE(oracle::max_abs_diff(tx.data, ux.data) == 0.0);

    Image go = mse_loss_grad(tx, target, 1.0);
    GradientSet tg = backward(tied, tc, go);
    GradientSet ug = backward(untied, uc, go);

    for (int bank = 0; bank < 2; ++bank) {
        const Bank b = bank == 0 ? Bank::Analysis : Bank::Synthesis;
        for (int m = 0; m < 3; ++m)
            for (int s = 0; s < 2; ++s)
                for (int comp = 0; comp < 6; ++comp) {
                    const double tv = tg[tied.layout.atom(b, 0, m, s, comp)];
                    double sum = 0.0;
                    for (int k = 0; k < K; ++k) sum += ug[untied.layout.atom(b, k, m, s, comp)];
                    CHECK(std::fabs(tv - sum) / std::max(1.0, std::fabs(sum)) < 1e-10);
                }
    }
    for (int m = 0; m < 3; ++m) {
        double sum0 = 0.0, sum1 = 0.0;
        for (int k = 0; k < K; ++k) {
            sum0 += ug[untied.layout.tau0(k, m)];
            sum1 += ug[untied.layout.tau1(k, m)];
        }
        CHECK(std::fabs(tg[tied.layout.tau0(0, m)] - sum0) / std::max(1.0, std::fabs(sum0)) <
              1e-10);
        CHECK(std::fabs(tg[tied.layout.tau1(0, m)] - sum1) / std::max(1.0, std::fabs(sum1)) <
              1e-10);
    }
    // dictionary storage is never tied: gradients agree exactly
    for (int m = 0; m < 3; ++m)
        for (int s = 0; s < 2; ++s)
            for (int comp = 0; comp < 6; ++comp)
                CHECK(tg[tied.layout.atom(Bank::Dictionary, 0, m, s, comp)] ==
                      doctest::Approx(ug[untied.layout.atom(Bank::Dictionary, 0, m, s, comp)])
                          .epsilon(1e-12));
}

TEST_CASE("backward rejects a stale cache") {
    ArchConfig arch = arch_of(2, 2, 1, 3, 1, false, tie_none());
    ModelParams params = init_model(arch, 1);
    CounterRng rng(43, StreamKind::Test, 33);
    Image y = oracle::random_image(6, 6, rng);
    RealizedModel banks = realize_model(params);
    ForwardCache cache;
    forward(params, banks, y, 25.0, &cache);
    params.values[0] += 0.1;  // parameters moved after the forward pass
    CHECK_THROWS(backward(params, cache, Image(6, 6)));
}

TEST_CASE("optimizer_step reproduces two hand-computed Adam updates") {
    ArchConfig arch = arch_of(1, 1, 1, 3, 1, false, tie_none());
    ModelParams params = init_model(arch, 3);
    const size_t n = params.values.size();
    REQUIRE(n == 19);  // 3 banks x 6 + tau0
    std::vector<double> start = params.values;

    OptimConfig cfg;
    cfg.lr_gabor = 1e-3;
    cfg.lr_thresh = 1e-4;
    cfg.lr_min = 1e-6;
    cfg.clip_norm = 0.0;  // disabled here
    cfg.total_steps = 100;
    OptimState st = make_optim_state(params);

    GradientSet g1(n), g2(n);
    CounterRng rng(44, StreamKind::Test, 34);
    for (auto& v : g1) v = rng.uniform(-1.0, 1.0);
    for (auto& v : g2) v = rng.uniform(-1.0, 1.0);

    optimizer_step(params, g1, st, cfg);
    optimizer_step(params, g2, st, cfg);

    // reference recurrence (Adam with bias correction, cosine schedule)
    std::vector<double> want = start, m(n, 0.0), v(n, 0.0);
    for (int t = 1; t <= 2; ++t) {
        const GradientSet& g = t == 1 ? g1 : g2;
        for (size_t i = 0; i < n; ++i) {
            m[i] = 0.9 * m[i] + 0.1 * g[i];
            v[i] = 0.999 * v[i] + 0.001 * g[i] * g[i];
            const double mhat = m[i] / (1.0 - std::pow(0.9, t));
            const double vhat = v[i] / (1.0 - std::pow(0.999, t));
            const double lr0 = i < params.layout.threshold_offset() ? 1e-3 : 1e-4;
            const double lr = scheduled_lr(lr0, 1e-6, t - 1, 100);
            want[i] -= lr * mhat / (std::sqrt(vhat) + 1e-8);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (i >= params.layout.threshold_offset() && want[i] < 0.0) want[i] = 0.0;
        CHECK(params.values[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("optimizer_step clips by global norm and projects thresholds") {
    ArchConfig arch = arch_of(1, 1, 1, 3, 1, false, tie_none());
    ModelParams params = init_model(arch, 4);
    const size_t n = params.values.size();
    OptimConfig cfg;
    cfg.clip_norm = 1.0;
    cfg.total_steps = 10;
    OptimState st = make_optim_state(params);
    GradientSet g(n, 10.0);  // norm 10 sqrt(n) >> 1
    StepInfo info = optimizer_step(params, g, st, cfg);
    CHECK(info.clipped);
    CHECK(info.grad_norm == doctest::Approx(10.0 * std::sqrt(static_cast<double>(n))));

    // a positive threshold gradient at a tiny threshold drives it negative;
    // the projection clamps it at zero
    const size_t tau = params.layout.tau0(0, 0);
    params.values[tau] = 1e-9;
    OptimState st2 = make_optim_state(params);
    GradientSet g2(n, 0.0);
    g2[tau] = 5.0;
    optimizer_step(params, g2, st2, cfg);
    CHECK(params.values[tau] == 0.0);

    GradientSet bad(n, 0.0);
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS(optimizer_step(params, bad, st2, cfg));
    bad[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS(optimizer_step(params, bad, st2, cfg));
}

TEST_CASE("scheduled_lr endpoints and midpoint") {
    CHECK(scheduled_lr(1e-3, 1e-6, 0, 1000) == 1e-3);
    CHECK(scheduled_lr(1e-3, 1e-6, 1000, 1000) == doctest::Approx(1e-6).epsilon(1e-9));
    CHECK(scheduled_lr(1e-3, 1e-6, 500, 1000) == doctest::Approx((1e-3 + 1e-6) / 2).epsilon(1e-12));
    CHECK(scheduled_lr(1e-3, 1e-6, 2000, 1000) == doctest::Approx(1e-6).epsilon(1e-9));  // clamped
    CHECK(scheduled_lr(1e-3, 1e-6, 250, 1000) >
          scheduled_lr(1e-3, 1e-6, 750, 1000));  // monotone decay
}
