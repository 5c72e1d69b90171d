#pragma once

#include <vector>

#include "gdl/net.hpp"

namespace gdl {

// Flat gradient vector congruent with ModelParams::values. Tied slots hold
// the sum of their member-layer gradients by construction of the layout.
using GradientSet = std::vector<double>;

/// Sum of squared differences (per-sample loss; callers average over the
/// batch for reporting).
double mse_loss(const Image& xhat, const Image& x);

/// d mse_loss / d xhat scaled by `scale`: 2 * scale * (xhat - x).
Image mse_loss_grad(const Image& xhat, const Image& x, double scale);

/// Exact reverse-mode gradients of sum(grad_out * xhat) with respect to
/// every learnable parameter: back through the dictionary synthesis, each
/// unrolled layer (threshold mask from cached pre-activations, adjoint
/// convolutions with the cached banks), then filter-tap gradients contracted
/// against the analytic Gabor partials. Throws if the cache is stale, i.e.
/// the parameter vector changed since the forward pass that filled it.
GradientSet backward(const ModelParams& params, const ForwardCache& cache,
                     const Image& grad_out);

}  // namespace gdl
