#include "gdl/eval.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "gdl/image_io.hpp"
#include "gdl/net.hpp"

namespace gdl {

namespace {

uint64_t eval_stream_index(size_t image_index, double sigma) {
    return mix64(std::bit_cast<uint64_t>(sigma)) ^ static_cast<uint64_t>(image_index);
}

}  // namespace

double psnr(const Image& x, const Image& xhat) {
    if (!x.same_shape(xhat)) throw std::invalid_argument("psnr: shape mismatch");
    double s = 0.0;
    for (size_t n = 0; n < x.data.size(); ++n) {
        const double d = x.data[n] - xhat.data[n];
        s += d * d;
    }
    const double mse = s / static_cast<double>(x.data.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

std::vector<EvalReport> sweep(const EvalModel& model, const Dataset& testset,
                              const std::vector<double>& sigma_list, uint64_t eval_seed) {
    if (testset.paths.empty()) throw std::invalid_argument("sweep: empty test set");
    std::vector<Image> clean;
    clean.reserve(testset.paths.size());
    for (const auto& p : testset.paths) clean.push_back(load_pgm(p));

    std::vector<EvalReport> reports;
    reports.reserve(sigma_list.size());
    for (double sigma : sigma_list) {
        const auto t0 = std::chrono::steady_clock::now();
        EvalReport rep;
        rep.model_id = model.id;
        rep.sigma_train_lo = model.sigma_train_lo;
        rep.sigma_train_hi = model.sigma_train_hi;
        rep.sigma_test = sigma;
        double sum = 0.0;
        for (size_t i = 0; i < clean.size(); ++i) {
            CounterRng rng(eval_seed, StreamKind::EvalNoise, eval_stream_index(i, sigma));
            Image noisy = add_awgn(clean[i], sigma, rng);
            Image xhat = denoise(model.params, noisy, sigma);
            const double db = psnr(clean[i], xhat);
            rep.images.push_back(std::filesystem::path(testset.paths[i]).filename().string());
            rep.psnr_db.push_back(db);
            sum += db;
        }
        rep.mean_psnr = sum / static_cast<double>(clean.size());
        rep.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        reports.push_back(std::move(rep));
    }
    return reports;
}

void write_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
    out << "model_id,sigma_train_lo,sigma_train_hi,sigma_test,image,psnr_db\n";
    for (const auto& rep : reports)
        for (size_t i = 0; i < rep.images.size(); ++i)
            out << rep.model_id << ',' << rep.sigma_train_lo << ',' << rep.sigma_train_hi
                << ',' << rep.sigma_test << ',' << rep.images[i] << ',' << rep.psnr_db[i]
                << '\n';
}

UsageProfile usage_profile(const ModelParams& params, const Dataset& ds, double sigma,
                           uint64_t eval_seed) {
    if (ds.paths.empty()) throw std::invalid_argument("usage_profile: empty dataset");
    const int M = params.arch.subbands;
    std::vector<double> sum(M, 0.0);
    std::vector<size_t> count(M, 0);
    RealizedModel banks = realize_model(params);
    for (size_t i = 0; i < ds.paths.size(); ++i) {
        Image clean = load_pgm(ds.paths[i]);
        CounterRng rng(eval_seed, StreamKind::EvalNoise, eval_stream_index(i, sigma));
        Image noisy = add_awgn(clean, sigma, rng);
        Image padded = reflect_pad_to_multiple(noisy, params.arch.stride);
        ForwardCache cache;
        forward(params, banks, padded, sigma, &cache);
        const Subband& z = cache.code.back();
        const size_t plane = static_cast<size_t>(z.height) * z.width;
        for (int m = 0; m < M; ++m) {
            const double* zp = z.plane(m);
            for (size_t n = 0; n < plane; ++n) sum[m] += std::fabs(zp[n]);
            count[m] += plane;
        }
    }
    UsageProfile prof;
    prof.usage.resize(M);
    for (int m = 0; m < M; ++m) prof.usage[m] = sum[m] / static_cast<double>(count[m]);
    prof.order.resize(M);
    std::iota(prof.order.begin(), prof.order.end(), 0);
    std::stable_sort(prof.order.begin(), prof.order.end(),
                     [&](int a, int b) { return prof.usage[a] > prof.usage[b]; });
    return prof;
}

void export_montage(const RealizedFilterbank& fb, const std::vector<int>& order,
                    const std::string& path) {
    if (static_cast<int>(order.size()) != fb.subbands)
        throw std::invalid_argument("export_montage: order must index every subband");
    const int p_sz = fb.filter_size;
    const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(fb.subbands))));
    const int cell = p_sz + 1;  // 1-pixel separator
    Image canvas(grid * cell + 1, grid * cell + 1);
    for (int idx = 0; idx < fb.subbands; ++idx) {
        const int m = order[idx];
        if (m < 0 || m >= fb.subbands)
            throw std::invalid_argument("export_montage: order entry out of range");
        const int gi = idx / grid, gj = idx % grid;
        double lo = fb.at(m, 0, 0), hi = lo;
        for (int p = 0; p < p_sz; ++p)
            for (int q = 0; q < p_sz; ++q) {
                lo = std::min(lo, fb.at(m, p, q));
                hi = std::max(hi, fb.at(m, p, q));
            }
        for (int p = 0; p < p_sz; ++p)
            for (int q = 0; q < p_sz; ++q) {
                int byte = 128;
                if (hi > lo)
                    byte = static_cast<int>(
                        std::lround(255.0 * (fb.at(m, p, q) - lo) / (hi - lo)));
                canvas.at(gi * cell + 1 + p, gj * cell + 1 + q) = byte / 255.0;
            }
    }
    save_pgm(canvas, path);
}

}  // namespace gdl
