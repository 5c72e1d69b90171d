#include "gdl/conv.hpp"

#include <stdexcept>

namespace gdl {

namespace {

// Column-phase decomposition of the zero-padded image: phase r holds padded
// columns j with j % s == r, so the strided access xpad[i][s*b + q] becomes
// the contiguous read phase[q % s][i][b + q / s]. Rows keep their padding.
struct PhasePad {
    int stride = 1;
    int padded_h = 0;
    std::vector<int> widths;            // per-phase column count
    std::vector<std::vector<double>> planes;  // [r]: padded_h x widths[r]

    const double* row(int r, int i) const {
        return planes[r].data() + static_cast<size_t>(i) * widths[r];
    }
    double* row(int r, int i) {
        return planes[r].data() + static_cast<size_t>(i) * widths[r];
    }
};

PhasePad make_phases(const Image& img, int stride, int pad) {
    PhasePad ph;
    ph.stride = stride;
    ph.padded_h = img.height + 2 * pad;
    const int padded_w = img.width + 2 * pad;
    ph.widths.resize(stride);
    ph.planes.resize(stride);
    for (int r = 0; r < stride; ++r) {
        ph.widths[r] = (padded_w - r + stride - 1) / stride;
        ph.planes[r].assign(static_cast<size_t>(ph.padded_h) * ph.widths[r], 0.0);
    }
    for (int i = 0; i < img.height; ++i) {
        const double* src = img.row(i);
        for (int r = 0; r < stride; ++r) {
            double* dst = ph.row(r, i + pad);
            // padded column j = stride*t + r maps to source column j - pad
            int t0 = (pad - r + stride - 1) / stride;            // first t with j >= pad
            for (int t = t0; t < ph.widths[r]; ++t) {
                const int j = stride * t + r - pad;
                if (j >= img.width) break;
                dst[t] = src[j];
            }
        }
    }
    return ph;
}

PhasePad make_accum(int out_h, int out_w, int stride, int pad) {
    PhasePad ph;
    ph.stride = stride;
    ph.padded_h = out_h + 2 * pad;
    const int padded_w = out_w + 2 * pad;
    ph.widths.resize(stride);
    ph.planes.resize(stride);
    for (int r = 0; r < stride; ++r) {
        ph.widths[r] = (padded_w - r + stride - 1) / stride;
        ph.planes[r].assign(static_cast<size_t>(ph.padded_h) * ph.widths[r], 0.0);
    }
    return ph;
}

void check_bank(const RealizedFilterbank& fb, int stride) {
    if (stride < 1) throw std::invalid_argument("conv: stride must be >= 1");
    if (fb.subbands < 1 || fb.filter_size < 1 || fb.filter_size % 2 == 0)
        throw std::invalid_argument("conv: invalid filterbank");
}

}  // namespace

Subband analysis_conv(const Image& img, const RealizedFilterbank& fb, int stride) {
    check_bank(fb, stride);
    if (img.height % stride != 0 || img.width % stride != 0)
        throw std::invalid_argument("analysis_conv: image dims not divisible by stride");
    const int p_sz = fb.filter_size;
    const int pad = (p_sz - 1) / 2;
    const int out_h = img.height / stride;
    const int out_w = img.width / stride;

    PhasePad ph = make_phases(img, stride, pad);
    Subband z(fb.subbands, out_h, out_w);

    for (int m = 0; m < fb.subbands; ++m) {
        const double* taps = fb.taps(m);
        for (int a = 0; a < out_h; ++a) {
            double* zrow = z.plane(m) + static_cast<size_t>(a) * out_w;
            for (int p = 0; p < p_sz; ++p) {
                const int i = stride * a + p;
                for (int q = 0; q < p_sz; ++q) {
                    const double w = taps[p * p_sz + q];
                    const double* src = ph.row(q % stride, i) + q / stride;
                    for (int b = 0; b < out_w; ++b) zrow[b] += w * src[b];
                }
            }
        }
    }
    return z;
}

Image synthesis_conv(const Subband& z, const RealizedFilterbank& fb, int stride) {
    check_bank(fb, stride);
    if (z.channels != fb.subbands)
        throw std::invalid_argument("synthesis_conv: subband count mismatch");
    const int p_sz = fb.filter_size;
    const int pad = (p_sz - 1) / 2;
    const int out_h = z.height * stride;
    const int out_w = z.width * stride;

    PhasePad acc = make_accum(out_h, out_w, stride, pad);

    for (int m = 0; m < fb.subbands; ++m) {
        const double* taps = fb.taps(m);
        for (int a = 0; a < z.height; ++a) {
            const double* zrow = z.plane(m) + static_cast<size_t>(a) * z.width;
            for (int p = 0; p < p_sz; ++p) {
                const int i = stride * a + p;
                for (int q = 0; q < p_sz; ++q) {
                    const double w = taps[p * p_sz + q];
                    double* dst = acc.row(q % stride, i) + q / stride;
                    for (int b = 0; b < z.width; ++b) dst[b] += w * zrow[b];
                }
            }
        }
    }

    // fold the padded phase accumulators back; contributions landing in the
    // pad margin are dropped (the adjoint of zero padding)
    Image out(out_h, out_w);
    for (int i = 0; i < out_h; ++i) {
        double* dst = out.row(i);
        for (int j = 0; j < out_w; ++j) {
            const int jp = j + pad;
            dst[j] = acc.row(jp % stride, i + pad)[jp / stride];
        }
    }
    return out;
}

std::vector<double> conv_weight_grad(const Subband& u, const Image& img, int filter_size,
                                     int stride) {
    if (stride < 1) throw std::invalid_argument("conv_weight_grad: stride must be >= 1");
    if (filter_size < 1 || filter_size % 2 == 0)
        throw std::invalid_argument("conv_weight_grad: filter size must be odd");
    if (img.height != u.height * stride || img.width != u.width * stride)
        throw std::invalid_argument("conv_weight_grad: shape mismatch");
    const int p_sz = filter_size;
    const int pad = (p_sz - 1) / 2;

    PhasePad ph = make_phases(img, stride, pad);
    std::vector<double> grad(static_cast<size_t>(u.channels) * p_sz * p_sz, 0.0);

    for (int m = 0; m < u.channels; ++m) {
        double* gm = grad.data() + static_cast<size_t>(m) * p_sz * p_sz;
        for (int a = 0; a < u.height; ++a) {
            const double* urow = u.plane(m) + static_cast<size_t>(a) * u.width;
            for (int p = 0; p < p_sz; ++p) {
                const int i = stride * a + p;
                for (int q = 0; q < p_sz; ++q) {
                    const double* src = ph.row(q % stride, i) + q / stride;
                    double s = 0.0;
                    for (int b = 0; b < u.width; ++b) s += urow[b] * src[b];
                    gm[p * p_sz + q] += s;
                }
            }
        }
    }
    return grad;
}

}  // namespace gdl
