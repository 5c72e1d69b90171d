#include "gdl/train.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gdl/autograd.hpp"
#include "gdl/eval.hpp"
#include "gdl/image_io.hpp"
#include "gdl/net.hpp"

namespace gdl {

namespace {

// balanced, replayable sample order: global slot g is served by image
// perm_e[g % N] where perm_e reshuffles 0..N-1 for epoch e = g / N
struct SampleSchedule {
    uint64_t seed;
    size_t n;
    uint64_t epoch = ~0ull;
    std::vector<size_t> perm;

    SampleSchedule(uint64_t seed_, size_t n_) : seed(seed_), n(n_), perm(n_) {}

    size_t image_for(uint64_t g) {
        const uint64_t e = g / n;
        if (e != epoch) {
            epoch = e;
            std::iota(perm.begin(), perm.end(), size_t{0});
            CounterRng rng(seed, StreamKind::Shuffle, e);
            for (size_t i = n - 1; i > 0; --i) {
                const size_t j = rng.next_below(i + 1);
                std::swap(perm[i], perm[j]);
            }
        }
        return perm[g % n];
    }
};

double validation_psnr(const ModelParams& params, const std::vector<Image>& val_images,
                       double sigma, uint64_t seed) {
    double sum = 0.0;
    for (size_t i = 0; i < val_images.size(); ++i) {
        CounterRng rng(seed, StreamKind::EvalNoise,
                       mix64(std::bit_cast<uint64_t>(sigma)) ^ static_cast<uint64_t>(i));
        Image noisy = add_awgn(val_images[i], sigma, rng);
        Image xhat = denoise(params, noisy, sigma);
        sum += psnr(val_images[i], xhat);
    }
    return sum / static_cast<double>(val_images.size());
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

TrainResult train(const RunConfig& cfg, const Dataset& train_set, const Dataset& val_set,
                  std::ostream* log) {
    if (train_set.paths.empty()) throw std::invalid_argument("train: empty training set");
    const TrainSettings& ts = cfg.train;

    std::vector<Image> images;
    images.reserve(train_set.paths.size());
    for (const auto& p : train_set.paths) {
        Image img = load_pgm(p);
        if (img.height < ts.crop || img.width < ts.crop)
            throw std::runtime_error(p + ": smaller than the training crop");
        images.push_back(std::move(img));
    }
    std::vector<Image> val_images;
    val_images.reserve(val_set.paths.size());
    for (const auto& p : val_set.paths) val_images.push_back(load_pgm(p));

    ModelParams params = init_model(cfg.arch, ts.seed);
    OptimState state = make_optim_state(params);
    OptimConfig opt;
    opt.lr_gabor = ts.lr_gabor;
    opt.lr_thresh = ts.lr_thresh;
    opt.lr_min = ts.lr_min;
    opt.clip_norm = ts.clip_norm;
    opt.total_steps = ts.steps;

    const double sigma_val = 0.5 * (ts.sigma_lo + ts.sigma_hi);
    TrainResult result;
    result.best = params;

    if (log) {
        *log << "# run " << cfg.out.name << ": layers=" << cfg.arch.layers
             << " subbands=" << cfg.arch.subbands << " stride=" << cfg.arch.stride
             << " filter_size=" << cfg.arch.filter_size
             << " mog_order=" << cfg.arch.mog_order
             << " adaptive=" << (cfg.arch.adaptive ? 1 : 0)
             << " tied=" << format_tie(cfg.arch.tied)
             << " params=" << count_params(cfg.arch) << "\n";
        *log << "# sigma range [" << fmt(ts.sigma_lo) << ", " << fmt(ts.sigma_hi) << "]"
             << (ts.sigma_lo == ts.sigma_hi ? " (single noise level)" : " (blind range)")
             << ", batch " << ts.batch << ", crop " << ts.crop << ", steps " << ts.steps
             << ", seed " << ts.seed << "\n";
    }

    SampleSchedule schedule(ts.seed, images.size());
    GradientSet grads(params.values.size());

    for (long step = 0; step < ts.steps; ++step) {
        const auto t0 = std::chrono::steady_clock::now();
        RealizedModel banks = realize_model(params);

        std::fill(grads.begin(), grads.end(), 0.0);
        double loss_sum = 0.0;
        for (int b = 0; b < ts.batch; ++b) {
            const uint64_t g = static_cast<uint64_t>(step) * ts.batch + b;
            const Image& src = images[schedule.image_for(g)];

            CounterRng aug_rng(ts.seed, StreamKind::Augment, g);
            Image clean = sample_patch(src, ts.crop, aug_rng, true);

            CounterRng sigma_rng(ts.seed, StreamKind::Sigma, g);
            const double sigma = sigma_rng.uniform(ts.sigma_lo, ts.sigma_hi);

            CounterRng noise_rng(ts.seed, StreamKind::Noise, g);
            Image noisy = add_awgn(clean, sigma, noise_rng);

            ForwardCache cache;
            Image xhat = forward(params, banks, noisy, sigma, &cache);
            loss_sum += mse_loss(xhat, clean);

            Image grad_out = mse_loss_grad(xhat, clean, 1.0 / ts.batch);
            GradientSet sample_grads = backward(params, cache, grad_out);
            for (size_t i = 0; i < grads.size(); ++i) grads[i] += sample_grads[i];
        }
        const double loss = loss_sum / ts.batch;
        if (!std::isfinite(loss))
            throw std::runtime_error("train: non-finite loss at step " + std::to_string(step));

        StepInfo info = optimizer_step(params, grads, state, opt);

        const bool validate =
            !val_images.empty() && ((step + 1) % ts.val_every == 0 || step + 1 == ts.steps);
        double val = 0.0;
        if (validate) {
            val = validation_psnr(params, val_images, sigma_val, ts.seed);
            if (val > result.best_val_psnr) {
                result.best_val_psnr = val;
                result.best_step = step + 1;
                result.best = params;
            }
        }

        if (log) {
            const double wall_ms = std::chrono::duration<double, std::milli>(
                                       std::chrono::steady_clock::now() - t0)
                                       .count();
            *log << "step=" << (step + 1) << " loss=" << fmt(loss)
                 << " lr=" << fmt(info.lr_gabor) << " wall_ms=" << fmt(wall_ms);
            if (info.clipped) *log << " clipped=1";
            if (validate) *log << " val_psnr=" << fmt(val);
            *log << "\n";
            log->flush();
        }
        result.final_loss = loss;
    }

    result.last = params;
    if (result.best_step < 0) result.best = result.last;
    return result;
}

}  // namespace gdl
