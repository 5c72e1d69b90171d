#include "gdl/autograd.hpp"

#include <cmath>
#include <stdexcept>

namespace gdl {

namespace {

// Contract a bank's tap gradients (M x P x P) against the analytic partials
// of each atom and accumulate into the flat gradient at that bank's slots.
void accumulate_bank(const ModelParams& params, Bank bank, int layer,
                     const std::vector<double>& tap_grad, double sign, GradientSet& g) {
    const ArchConfig& arch = params.arch;
    const int p_sz = arch.filter_size;
    const size_t plane = static_cast<size_t>(p_sz) * p_sz;
    const FilterbankSpec spec = bank_spec(params, bank, layer);
    for (int m = 0; m < arch.subbands; ++m) {
        const double* gt = tap_grad.data() + m * plane;
        for (int j = 0; j < arch.mog_order; ++j) {
            const GaborGrad gg = grad_gabor(spec.subbands[m].atoms[j], p_sz);
            for (int c = 0; c < 6; ++c) {
                double s = 0.0;
                const double* d = gg.d[c].data();
                for (size_t n = 0; n < plane; ++n) s += gt[n] * d[n];
                g[params.layout.atom(bank, layer, m, j, c)] += sign * s;
            }
        }
    }
}

}  // namespace

double mse_loss(const Image& xhat, const Image& x) {
    if (!xhat.same_shape(x)) throw std::invalid_argument("mse_loss: shape mismatch");
    double s = 0.0;
    for (size_t n = 0; n < x.data.size(); ++n) {
        const double d = xhat.data[n] - x.data[n];
        s += d * d;
    }
    return s;
}

Image mse_loss_grad(const Image& xhat, const Image& x, double scale) {
    if (!xhat.same_shape(x)) throw std::invalid_argument("mse_loss_grad: shape mismatch");
    Image g(xhat.height, xhat.width);
    for (size_t n = 0; n < g.data.size(); ++n)
        g.data[n] = 2.0 * scale * (xhat.data[n] - x.data[n]);
    return g;
}

GradientSet backward(const ModelParams& params, const ForwardCache& cache,
                     const Image& grad_out) {
    const ArchConfig& arch = params.arch;
    const int K = arch.layers;
    if (static_cast<int>(cache.pre.size()) != K ||
        static_cast<int>(cache.code.size()) != K + 1 ||
        static_cast<int>(cache.resid.size()) != K)
        throw std::invalid_argument("backward: cache missing or incomplete");
    if (cache.param_snapshot != params.values)
        throw std::invalid_argument("backward: stale cache (parameters changed since forward)");

    GradientSet g(params.values.size(), 0.0);
    const double sig_scale = cache.sigma / 255.0;

    // top of the graph: xhat = synthesis(z^K; D)
    Subband gz = analysis_conv(grad_out, cache.banks.dictionary, arch.stride);
    accumulate_bank(params, Bank::Dictionary, 0,
                    conv_weight_grad(cache.code[K], grad_out, arch.filter_size, arch.stride),
                    1.0, g);

    for (int k = K - 1; k >= 0; --k) {
        // z^{k+1} = ST(u^k, tau^k): pass-through mask on |u| > tau, and the
        // active entries feed -sign(u) into the threshold of their subband
        const Subband& u = cache.pre[k];
        const std::vector<double>& tau = cache.taus[k];
        Subband gu(u.channels, u.height, u.width);
        const size_t plane = static_cast<size_t>(u.height) * u.width;
        for (int m = 0; m < u.channels; ++m) {
            const double t = tau[m];
            const double* us = u.plane(m);
            const double* gs = gz.plane(m);
            double* gd = gu.plane(m);
            double gtau = 0.0;
            for (size_t n = 0; n < plane; ++n) {
                if (std::fabs(us[n]) > t) {
                    gd[n] = gs[n];
                    gtau -= us[n] > 0.0 ? gs[n] : -gs[n];
                } else {
                    gd[n] = 0.0;
                }
            }
            g[params.layout.tau0(k, m)] += gtau;
            if (arch.adaptive) g[params.layout.tau1(k, m)] += gtau * sig_scale;
        }

        // u^k = z^k - analysis(r^k; A^k)
        Image gr = synthesis_conv(gu, cache.banks.analysis[k], arch.stride);
        for (double& v : gr.data) v = -v;
        accumulate_bank(params, Bank::Analysis, k,
                        conv_weight_grad(gu, cache.resid[k], arch.filter_size, arch.stride),
                        -1.0, g);

        // r^k = synthesis(z^k; B^k) - y; at k = 0 the code is identically
        // zero, so both the B^0 tap gradient and gz0 vanish
        if (k > 0) {
            gz = std::move(gu);
            Subband back = analysis_conv(gr, cache.banks.synthesis[k], arch.stride);
            for (size_t n = 0; n < gz.data.size(); ++n) gz.data[n] += back.data[n];
            accumulate_bank(params, Bank::Synthesis, k,
                            conv_weight_grad(cache.code[k], gr, arch.filter_size, arch.stride),
                            1.0, g);
        }
    }
    return g;
}

}  // namespace gdl
