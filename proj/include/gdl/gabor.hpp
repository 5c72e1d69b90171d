#pragma once

#include <array>
#include <complex>
#include <vector>

#include "gdl/rng.hpp"
#include "gdl/tensor.hpp"

namespace gdl {

// One real 2D Gabor atom: g(x) = alpha * exp(-|a o x|^2) * cos(w0.x + psi),
// with x on the centered integer lattice. All six entries are unconstrained
// reals; a -> 0 degenerates to a windowed cosine and is permitted.
struct GaborParams {
    double alpha = 1.0;
    double a1 = 0.0, a2 = 0.0;  // root precision per axis, 1/pixels
    double w1 = 0.0, w2 = 0.0;  // angular frequency, radians/pixel
    double psi = 0.0;           // phase, radians
};

// Mixture-of-Gabor description of one subband filter: the sum of S atoms.
struct MoGAtomSet {
    std::vector<GaborParams> atoms;
};

// Generative description of an M-subband filterbank with odd filter size P.
// Parameter count is exactly 6 * S * M.
struct FilterbankSpec {
    std::vector<MoGAtomSet> subbands;
    int filter_size = 0;

    int num_subbands() const { return static_cast<int>(subbands.size()); }
    int mog_order() const { return subbands.empty() ? 0 : static_cast<int>(subbands[0].atoms.size()); }
};

// Filter taps realized from a FilterbankSpec, M x P x P, plus the generating
// spec so provenance survives serialization round trips.
struct RealizedFilterbank {
    int subbands = 0;
    int filter_size = 0;
    std::vector<double> weights;  // [m][p][q]
    FilterbankSpec source;

    double& at(int m, int p, int q) {
        return weights[(static_cast<size_t>(m) * filter_size + p) * filter_size + q];
    }
    double at(int m, int p, int q) const {
        return weights[(static_cast<size_t>(m) * filter_size + p) * filter_size + q];
    }
    const double* taps(int m) const {
        return weights.data() + static_cast<size_t>(m) * filter_size * filter_size;
    }
};

// Partial derivatives of one realized atom with respect to its six
// parameters, each a P x P tap grid in the order (alpha, a1, a2, w1, w2, psi).
struct GaborGrad {
    int filter_size = 0;
    std::array<std::vector<double>, 6> d;
};

/// Evaluate one Gabor atom on the centered P x P lattice (P odd).
/// filter[i][j] is taken at x = (j - (P-1)/2, i - (P-1)/2).
std::vector<double> eval_gabor(const GaborParams& phi, int filter_size);

/// Elementwise sum of eval_gabor over the atoms of a mixture.
std::vector<double> eval_mog(const MoGAtomSet& atoms, int filter_size);

/// Continuous-domain spectrum of one atom under F(w) = integral g(x) e^{-j w.x} dx:
///   F(w) = (alpha*pi / (2 a1 a2)) * ( e^{j psi} e^{-|(w - w0)/(2a)|^2}
///                                   + e^{-j psi} e^{-|(w + w0)/(2a)|^2} ),
/// the conjugate-symmetric pair of Gaussians centered at +-w0. Requires
/// a1 != 0 and a2 != 0.
std::complex<double> gabor_fourier(const GaborParams& phi, double wx, double wy);

/// Analytic partials of eval_gabor at every lattice point. d/d_alpha is the
/// alpha-free factor (valid at alpha = 0).
GaborGrad grad_gabor(const GaborParams& phi, int filter_size);

/// Realize every subband of a spec. weights[m] == eval_mog(subbands[m]).
RealizedFilterbank realize_filterbank(const FilterbankSpec& spec);

/// Draw one random filterbank spec: alpha = 1, a_i ~ U[0.1, 0.5],
/// w0 = r * (cos t, sin t) with r ~ U[0, pi] and t uniform on the circle,
/// psi ~ U[-pi, pi). Deterministic given the generator state.
FilterbankSpec init_filterbank(CounterRng& rng, int subbands, int mog_order, int filter_size);

struct SpectralNormResult {
    double value = 0.0;   // dominant eigenvalue of D^T D, i.e. |D|_2^2
    int iterations = 0;
    bool converged = false;
};

/// Power iteration on z -> D^T (D z) over subband tensors of shape
/// M x probe_h x probe_w (probe dims divisible by the stride). The probe
/// start vector is drawn from rng.
SpectralNormResult spectral_norm(const RealizedFilterbank& fb, int stride, int probe_h,
                                 int probe_w, int max_iters, double tol, CounterRng& rng);

/// Divide every atom's alpha by sqrt(L); everything else untouched. L > 0.
FilterbankSpec normalize_scales(const FilterbankSpec& spec, double l2_norm_sq);

/// Flatten to 6*S*M doubles, subband-major, atom-minor, each atom as
/// (alpha, a1, a2, w01, w02, psi).
std::vector<double> flatten_spec(const FilterbankSpec& spec);

/// Inverse of flatten_spec.
FilterbankSpec unflatten_spec(const std::vector<double>& flat, int subbands, int mog_order,
                              int filter_size);

}  // namespace gdl
