#pragma once

#include <vector>

#include "gdl/conv.hpp"
#include "gdl/model.hpp"
#include "gdl/tensor.hpp"

namespace gdl {

/// out[m][n] = sign(z[m][n]) * max(0, |z[m][n]| - tau[m]); tau >= 0 elementwise.
Subband soft_threshold(const Subband& z, const std::vector<double>& tau);

/// Pad on the bottom/right by mirror reflection (edge included) up to the
/// next multiple of `multiple`. Required padding must not exceed the image.
Image reflect_pad_to_multiple(const Image& img, int multiple);

/// Top-left crop back to height x width.
Image crop(const Image& img, int height, int width);

// Everything backward needs to replay one forward pass exactly: the realized
// banks that were used, every code iterate, every pre-threshold activation
// (the soft-threshold mask is a function of those), every residual, the
// thresholds, and a snapshot of the parameter vector for staleness checks.
struct ForwardCache {
    RealizedModel banks;
    std::vector<Subband> code;        // z^(0) .. z^(K); code[0] is all zero
    std::vector<Subband> pre;         // u^(k), k = 0 .. K-1
    std::vector<Image> resid;         // r^(k) = B^(k) z^(k) - y
    std::vector<std::vector<double>> taus;  // per-layer thresholds, K x M
    std::vector<double> param_snapshot;
    double sigma = 0.0;
};

/// K unrolled ISTA iterations from z^(0) = 0, then x^ = D z^(K). Requires
/// y dims divisible by the stride (use denoise() for arbitrary sizes).
/// banks must be realized from `params`; pass cache to enable backward.
Image forward(const ModelParams& params, const RealizedModel& banks, const Image& y,
              double sigma, ForwardCache* cache);

/// Reflect-pad to stride-divisible dims, run forward, crop to input size.
Image denoise(const ModelParams& params, const Image& y, double sigma);

}  // namespace gdl
