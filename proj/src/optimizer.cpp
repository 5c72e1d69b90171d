#include "gdl/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace gdl {

OptimState make_optim_state(const ModelParams& params) {
    OptimState st;
    st.m.assign(params.values.size(), 0.0);
    st.v.assign(params.values.size(), 0.0);
    return st;
}

double scheduled_lr(double lr0, double lr_min, long step, long total_steps) {
    if (total_steps < 1) total_steps = 1;
    double p = static_cast<double>(step) / static_cast<double>(total_steps);
    if (p > 1.0) p = 1.0;
    return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(3.14159265358979323846 * p));
}

StepInfo optimizer_step(ModelParams& params, const GradientSet& grads, OptimState& state,
                        const OptimConfig& cfg) {
    const size_t n = params.values.size();
    if (grads.size() != n || state.m.size() != n || state.v.size() != n)
        throw std::invalid_argument("optimizer_step: shape mismatch");

    double sq = 0.0;
    for (double gv : grads) {
        if (!std::isfinite(gv))
            throw std::runtime_error("optimizer_step: non-finite gradient, step aborted");
        sq += gv * gv;
    }

    StepInfo info;
    info.grad_norm = std::sqrt(sq);
    double scale = 1.0;
    if (cfg.clip_norm > 0.0 && info.grad_norm > cfg.clip_norm) {
        scale = cfg.clip_norm / info.grad_norm;
        info.clipped = true;
    }

    info.lr_gabor = scheduled_lr(cfg.lr_gabor, cfg.lr_min, state.step, cfg.total_steps);
    info.lr_thresh = scheduled_lr(cfg.lr_thresh, cfg.lr_min, state.step, cfg.total_steps);

    state.step += 1;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);

    const size_t thresh_at = params.layout.threshold_offset();
    for (size_t i = 0; i < n; ++i) {
        const double gv = grads[i] * scale;
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * gv;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * gv * gv;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        const double lr = i < thresh_at ? info.lr_gabor : info.lr_thresh;
        params.values[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    for (size_t i = thresh_at; i < n; ++i)
        if (params.values[i] < 0.0) params.values[i] = 0.0;
    return info;
}

}  // namespace gdl
