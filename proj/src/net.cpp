#include "gdl/net.hpp"

#include <cmath>
#include <stdexcept>

namespace gdl {

Subband soft_threshold(const Subband& z, const std::vector<double>& tau) {
    if (static_cast<int>(tau.size()) != z.channels)
        throw std::invalid_argument("soft_threshold: one threshold per subband required");
    for (double t : tau)
        if (t < 0.0) throw std::invalid_argument("soft_threshold: negative threshold");
    Subband out(z.channels, z.height, z.width);
    const size_t plane = static_cast<size_t>(z.height) * z.width;
    for (int m = 0; m < z.channels; ++m) {
        const double t = tau[m];
        const double* src = z.plane(m);
        double* dst = out.plane(m);
        for (size_t n = 0; n < plane; ++n) {
            const double v = src[n];
            const double mag = std::fabs(v) - t;
            dst[n] = mag > 0.0 ? (v > 0.0 ? mag : -mag) : 0.0;
        }
    }
    return out;
}

Image reflect_pad_to_multiple(const Image& img, int multiple) {
    if (multiple < 1) throw std::invalid_argument("reflect_pad_to_multiple: multiple >= 1");
    const int pad_h = (multiple - img.height % multiple) % multiple;
    const int pad_w = (multiple - img.width % multiple) % multiple;
    if (pad_h == 0 && pad_w == 0) return img;
    if (pad_h > img.height || pad_w > img.width)
        throw std::invalid_argument("reflect_pad_to_multiple: image smaller than the padding");
    Image out(img.height + pad_h, img.width + pad_w);
    for (int i = 0; i < out.height; ++i) {
        const int si = i < img.height ? i : 2 * img.height - 1 - i;
        for (int j = 0; j < out.width; ++j) {
            const int sj = j < img.width ? j : 2 * img.width - 1 - j;
            out.at(i, j) = img.at(si, sj);
        }
    }
    return out;
}

Image crop(const Image& img, int height, int width) {
    if (height > img.height || width > img.width)
        throw std::invalid_argument("crop: target exceeds image");
    Image out(height, width);
    for (int i = 0; i < height; ++i)
        for (int j = 0; j < width; ++j) out.at(i, j) = img.at(i, j);
    return out;
}

Image forward(const ModelParams& params, const RealizedModel& banks, const Image& y,
              double sigma, ForwardCache* cache) {
    const ArchConfig& arch = params.arch;
    validate_arch(arch);
    if (sigma < 0.0) throw std::invalid_argument("forward: sigma must be >= 0");
    if (y.height % arch.stride != 0 || y.width % arch.stride != 0)
        throw std::invalid_argument("forward: input dims must be divisible by the stride");
    if (static_cast<int>(banks.analysis.size()) != arch.layers ||
        static_cast<int>(banks.synthesis.size()) != arch.layers)
        throw std::invalid_argument("forward: bank count does not match the architecture");

    const int zh = y.height / arch.stride;
    const int zw = y.width / arch.stride;

    if (cache) {
        cache->banks = banks;
        cache->code.clear();
        cache->pre.clear();
        cache->resid.clear();
        cache->taus.clear();
        cache->code.reserve(arch.layers + 1);
        cache->pre.reserve(arch.layers);
        cache->resid.reserve(arch.layers);
        cache->taus.reserve(arch.layers);
        cache->param_snapshot = params.values;
        cache->sigma = sigma;
    }

    Subband z(arch.subbands, zh, zw);
    if (cache) cache->code.push_back(z);

    for (int k = 0; k < arch.layers; ++k) {
        Image r = synthesis_conv(z, banks.synthesis[k], arch.stride);
        for (size_t n = 0; n < r.data.size(); ++n) r.data[n] -= y.data[n];

        Subband corr = analysis_conv(r, banks.analysis[k], arch.stride);
        Subband u = z;
        for (size_t n = 0; n < u.data.size(); ++n) u.data[n] -= corr.data[n];

        std::vector<double> tau = layer_thresholds(params, k, sigma);
        z = soft_threshold(u, tau);

        if (cache) {
            cache->resid.push_back(std::move(r));
            cache->pre.push_back(std::move(u));
            cache->taus.push_back(std::move(tau));
            cache->code.push_back(z);
        }
    }
    return synthesis_conv(z, banks.dictionary, arch.stride);
}

Image denoise(const ModelParams& params, const Image& y, double sigma) {
    Image padded = reflect_pad_to_multiple(y, params.arch.stride);
    RealizedModel banks = realize_model(params);
    Image xhat = forward(params, banks, padded, sigma, nullptr);
    return crop(xhat, y.height, y.width);
}

}  // namespace gdl
