#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gdl/data.hpp"
#include "gdl/model.hpp"

namespace gdl {

/// 10 log10(1 / mean((x - xhat)^2)) with peak 1.0; +infinity for identical
/// inputs (the sentinel for a perfect reconstruction).
double psnr(const Image& x, const Image& xhat);

struct EvalReport {
    std::string model_id;
    double sigma_train_lo = 0.0;
    double sigma_train_hi = 0.0;
    double sigma_test = 0.0;
    std::vector<std::string> images;  // manifest order
    std::vector<double> psnr_db;
    double mean_psnr = 0.0;
    double wall_ms = 0.0;
};

// What evaluation needs to know about a model beyond its parameters.
struct EvalModel {
    ModelParams params;
    std::string id;
    double sigma_train_lo = 0.0;
    double sigma_train_hi = 0.0;
};

/// For each test sigma: noise every image with the fixed evaluation seed
/// (stream keyed by image index and the sigma bit pattern, so sweeps are
/// comparable across models), denoise with the true sigma, report PSNR.
std::vector<EvalReport> sweep(const EvalModel& model, const Dataset& testset,
                              const std::vector<double>& sigma_list, uint64_t eval_seed);

/// Per-image rows: model_id, sigma_train_lo, sigma_train_hi, sigma_test,
/// image, psnr_db; header included.
void write_csv(const std::vector<EvalReport>& reports, std::ostream& out);

struct UsageProfile {
    std::vector<double> usage;  // mean |z^(K)[m]| pooled over the dataset
    std::vector<int> order;     // non-increasing usage; ties by subband index
};

/// Final-layer code statistics over a dataset noised at `sigma` with the
/// evaluation seed. Deterministic given (eval_seed, sigma, dataset order).
UsageProfile usage_profile(const ModelParams& params, const Dataset& ds, double sigma,
                           uint64_t eval_seed);

/// Tile the filters into a ceil(sqrt(M))-wide grid in the given order, each
/// cell affinely mapped to [0,255] on its own (constant cells map to 128),
/// 1-pixel separators, written as binary PGM.
void export_montage(const RealizedFilterbank& fb, const std::vector<int>& order,
                    const std::string& path);

}  // namespace gdl
