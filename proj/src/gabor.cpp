#include "gdl/gabor.hpp"

#include <cmath>
#include <stdexcept>

#include "gdl/conv.hpp"

namespace gdl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_filter_size(int p) {
    if (p < 1 || p % 2 == 0)
        throw std::invalid_argument("filter size must be a positive odd integer");
}

}  // namespace

std::vector<double> eval_gabor(const GaborParams& phi, int filter_size) {
    check_filter_size(filter_size);
    const int c = (filter_size - 1) / 2;
    std::vector<double> out(static_cast<size_t>(filter_size) * filter_size);
    for (int i = 0; i < filter_size; ++i) {
        const double x2 = i - c;
        for (int j = 0; j < filter_size; ++j) {
            const double x1 = j - c;
            const double env = std::exp(-(phi.a1 * x1 * phi.a1 * x1 + phi.a2 * x2 * phi.a2 * x2));
            const double carrier = std::cos(phi.w1 * x1 + phi.w2 * x2 + phi.psi);
            out[static_cast<size_t>(i) * filter_size + j] = phi.alpha * env * carrier;
        }
    }
    return out;
}

std::vector<double> eval_mog(const MoGAtomSet& atoms, int filter_size) {
    if (atoms.atoms.empty()) throw std::invalid_argument("eval_mog: empty atom set");
    check_filter_size(filter_size);
    std::vector<double> out(static_cast<size_t>(filter_size) * filter_size, 0.0);
    for (const auto& phi : atoms.atoms) {
        auto g = eval_gabor(phi, filter_size);
        for (size_t n = 0; n < out.size(); ++n) out[n] += g[n];
    }
    return out;
}

std::complex<double> gabor_fourier(const GaborParams& phi, double wx, double wy) {
    if (phi.a1 == 0.0 || phi.a2 == 0.0)
        throw std::invalid_argument("gabor_fourier: zero precision component");
    auto bump = [&](double u1, double u2) {
        const double e1 = u1 / (2.0 * phi.a1);
        const double e2 = u2 / (2.0 * phi.a2);
        return std::exp(-(e1 * e1 + e2 * e2));
    };
    const double pref = phi.alpha * kPi / (2.0 * std::abs(phi.a1) * std::abs(phi.a2));
    const std::complex<double> plus = std::polar(1.0, phi.psi) * bump(wx - phi.w1, wy - phi.w2);
    const std::complex<double> minus = std::polar(1.0, -phi.psi) * bump(wx + phi.w1, wy + phi.w2);
    return pref * (plus + minus);
}

GaborGrad grad_gabor(const GaborParams& phi, int filter_size) {
    check_filter_size(filter_size);
    const int c = (filter_size - 1) / 2;
    GaborGrad g;
    g.filter_size = filter_size;
    const size_t n = static_cast<size_t>(filter_size) * filter_size;
    for (auto& v : g.d) v.resize(n);
    for (int i = 0; i < filter_size; ++i) {
        const double x2 = i - c;
        for (int j = 0; j < filter_size; ++j) {
            const double x1 = j - c;
            const size_t idx = static_cast<size_t>(i) * filter_size + j;
            const double env = std::exp(-(phi.a1 * x1 * phi.a1 * x1 + phi.a2 * x2 * phi.a2 * x2));
            const double arg = phi.w1 * x1 + phi.w2 * x2 + phi.psi;
            const double cosv = std::cos(arg);
            const double sinv = std::sin(arg);
            const double val = phi.alpha * env * cosv;
            g.d[0][idx] = env * cosv;                          // d/d_alpha, alpha-free factor
            g.d[1][idx] = -2.0 * phi.a1 * x1 * x1 * val;       // d/d_a1
            g.d[2][idx] = -2.0 * phi.a2 * x2 * x2 * val;       // d/d_a2
            g.d[3][idx] = -phi.alpha * env * sinv * x1;        // d/d_w1
            g.d[4][idx] = -phi.alpha * env * sinv * x2;        // d/d_w2
            g.d[5][idx] = -phi.alpha * env * sinv;             // d/d_psi
        }
    }
    return g;
}

RealizedFilterbank realize_filterbank(const FilterbankSpec& spec) {
    check_filter_size(spec.filter_size);
    if (spec.subbands.empty()) throw std::invalid_argument("realize_filterbank: no subbands");
    RealizedFilterbank fb;
    fb.subbands = spec.num_subbands();
    fb.filter_size = spec.filter_size;
    fb.source = spec;
    fb.weights.resize(static_cast<size_t>(fb.subbands) * spec.filter_size * spec.filter_size);
    const size_t plane = static_cast<size_t>(spec.filter_size) * spec.filter_size;
    for (int m = 0; m < fb.subbands; ++m) {
        auto w = eval_mog(spec.subbands[m], spec.filter_size);
        std::copy(w.begin(), w.end(), fb.weights.begin() + m * plane);
    }
    return fb;
}

FilterbankSpec init_filterbank(CounterRng& rng, int subbands, int mog_order, int filter_size) {
    if (subbands < 1 || mog_order < 1)
        throw std::invalid_argument("init_filterbank: need M >= 1 and S >= 1");
    check_filter_size(filter_size);
    FilterbankSpec spec;
    spec.filter_size = filter_size;
    spec.subbands.resize(subbands);
    for (auto& sb : spec.subbands) {
        sb.atoms.resize(mog_order);
        for (auto& phi : sb.atoms) {
            phi.alpha = 1.0;
            phi.a1 = rng.uniform(0.1, 0.5);
            phi.a2 = rng.uniform(0.1, 0.5);
            const double r = rng.uniform(0.0, kPi);
            const double t = rng.uniform(0.0, 2.0 * kPi);
            phi.w1 = r * std::cos(t);
            phi.w2 = r * std::sin(t);
            phi.psi = rng.uniform(-kPi, kPi);
        }
    }
    return spec;
}

SpectralNormResult spectral_norm(const RealizedFilterbank& fb, int stride, int probe_h,
                                 int probe_w, int max_iters, double tol, CounterRng& rng) {
    if (max_iters < 1) throw std::invalid_argument("spectral_norm: iters >= 1 required");
    if (probe_h % stride != 0 || probe_w % stride != 0)
        throw std::invalid_argument("spectral_norm: probe dims must be divisible by stride");

    Subband v(fb.subbands, probe_h / stride, probe_w / stride);
    for (auto& x : v.data) x = rng.next_gaussian();
    double norm = std::sqrt(dot(v.data, v.data));
    if (norm == 0.0) throw std::runtime_error("spectral_norm: zero start vector");
    for (auto& x : v.data) x /= norm;

    SpectralNormResult res;
    double prev = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        Image img = synthesis_conv(v, fb, stride);
        Subband w = analysis_conv(img, fb, stride);
        const double rayleigh = dot(v.data, w.data);
        const double wnorm = std::sqrt(dot(w.data, w.data));
        res.value = rayleigh;
        res.iterations = it;
        if (wnorm == 0.0) {  // operator annihilated the probe; norm is 0
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        for (size_t n = 0; n < w.data.size(); ++n) v.data[n] = w.data[n] / wnorm;
        if (it > 1 && std::abs(rayleigh - prev) <= tol * std::max(1.0, std::abs(rayleigh))) {
            res.converged = true;
            return res;
        }
        prev = rayleigh;
    }
    res.converged = false;
    return res;
}

FilterbankSpec normalize_scales(const FilterbankSpec& spec, double l2_norm_sq) {
    if (!(l2_norm_sq > 0.0)) throw std::invalid_argument("normalize_scales: L must be > 0");
    FilterbankSpec out = spec;
    const double scale = 1.0 / std::sqrt(l2_norm_sq);
    for (auto& sb : out.subbands)
        for (auto& phi : sb.atoms) phi.alpha *= scale;
    return out;
}

std::vector<double> flatten_spec(const FilterbankSpec& spec) {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(spec.num_subbands()) * spec.mog_order() * 6);
    for (const auto& sb : spec.subbands)
        for (const auto& phi : sb.atoms) {
            flat.push_back(phi.alpha);
            flat.push_back(phi.a1);
            flat.push_back(phi.a2);
            flat.push_back(phi.w1);
            flat.push_back(phi.w2);
            flat.push_back(phi.psi);
        }
    return flat;
}

FilterbankSpec unflatten_spec(const std::vector<double>& flat, int subbands, int mog_order,
                              int filter_size) {
    if (flat.size() != static_cast<size_t>(6) * subbands * mog_order)
        throw std::invalid_argument("unflatten_spec: wrong element count");
    FilterbankSpec spec;
    spec.filter_size = filter_size;
    spec.subbands.resize(subbands);
    size_t k = 0;
    for (auto& sb : spec.subbands) {
        sb.atoms.resize(mog_order);
        for (auto& phi : sb.atoms) {
            phi.alpha = flat[k++];
            phi.a1 = flat[k++];
            phi.a2 = flat[k++];
            phi.w1 = flat[k++];
            phi.w2 = flat[k++];
            phi.psi = flat[k++];
        }
    }
    return spec;
}

}  // namespace gdl
