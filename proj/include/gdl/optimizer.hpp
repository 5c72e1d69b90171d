#pragma once

#include <cstddef>
#include <vector>

#include "gdl/autograd.hpp"
#include "gdl/model.hpp"

namespace gdl {

struct OptimConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double lr_gabor = 1e-3;   // initial rate for Gabor parameters
    double lr_thresh = 1e-4;  // initial rate for tau0/tau1
    double lr_min = 1e-6;     // cosine-decay floor for both groups
    double clip_norm = 100.0;
    long total_steps = 1;  // schedule horizon
};

struct OptimState {
    std::vector<double> m, v;  // Adam moments, congruent with the parameters
    long step = 0;
};

OptimState make_optim_state(const ModelParams& params);

struct StepInfo {
    double lr_gabor = 0.0;
    double lr_thresh = 0.0;
    double grad_norm = 0.0;
    bool clipped = false;
};

/// Cosine decay from lr0 to lr_min over cfg.total_steps; `step` counts
/// completed steps, so step 0 runs at the full initial rate.
double scheduled_lr(double lr0, double lr_min, long step, long total_steps);

/// One Adam step with global-norm clipping, split rates for Gabor vs
/// threshold coordinates, then projection tau0, tau1 <- max(0, .). Throws on
/// non-finite gradients. Callers re-realize filterbanks from the updated
/// parameters before the next forward pass.
StepInfo optimizer_step(ModelParams& params, const GradientSet& grads, OptimState& state,
                        const OptimConfig& cfg);

}  // namespace gdl
