#pragma once

#include "gdl/gabor.hpp"
#include "gdl/tensor.hpp"

namespace gdl {

/// Stride-s correlation of img with every filter, zero-padded by (P-1)/2 so
/// channel m has shape exactly (H/s) x (W/s). This is the analysis operator
/// A^T applied to an image. Requires H, W divisible by s.
Subband analysis_conv(const Image& img, const RealizedFilterbank& fb, int stride);

/// Exact adjoint of analysis_conv with the same bank and stride: transposed
/// strided correlation with matching zero padding, summed over subbands.
/// Output shape is (s*H') x (s*W').
Image synthesis_conv(const Subband& z, const RealizedFilterbank& fb, int stride);

/// Tap gradient shared by both operators: the bilinear form pairing a
/// subband tensor with an image. T[m][p][q] = sum_{a,b} u[m,a,b] *
/// xpad[s*a+p][s*b+q]. Equals d<u, analysis(x)>/dW and d<x, synthesis(u)>/dW.
std::vector<double> conv_weight_grad(const Subband& u, const Image& img, int filter_size,
                                     int stride);

}  // namespace gdl
