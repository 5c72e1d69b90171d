#include "gdl/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "gdl/autograd.hpp"
#include "gdl/data.hpp"
#include "gdl/net.hpp"

namespace gdl {

namespace {

// family tag per flat coordinate: 0..3 Gabor families, 4 tau0, 5 tau1
std::vector<int> family_tags(const ModelParams& params) {
    const ArchConfig& arch = params.arch;
    std::vector<int> tags(params.values.size(), -1);
    constexpr int comp_family[6] = {0, 1, 1, 2, 2, 3};
    for (int bank = 0; bank < 3; ++bank)
        for (int k = 0; k < (bank == 2 ? 1 : arch.layers); ++k)
            for (int m = 0; m < arch.subbands; ++m)
                for (int j = 0; j < arch.mog_order; ++j)
                    for (int c = 0; c < 6; ++c)
                        tags[params.layout.atom(static_cast<Bank>(bank), k, m, j, c)] =
                            comp_family[c];
    for (int k = 0; k < arch.layers; ++k)
        for (int m = 0; m < arch.subbands; ++m) {
            tags[params.layout.tau0(k, m)] = 4;
            if (arch.adaptive) tags[params.layout.tau1(k, m)] = 5;
        }
    return tags;
}

double loss_at(const ModelParams& params, const Image& noisy, const Image& clean,
               double sigma) {
    RealizedModel banks = realize_model(params);
    Image xhat = forward(params, banks, noisy, sigma, nullptr);
    return mse_loss(xhat, clean);
}

}  // namespace

double fd_coord_score(double analytic, double fd, double rel_tol, double abs_floor) {
    const double mag = std::max(std::fabs(analytic), std::fabs(fd));
    const double denom = std::max(mag, abs_floor / rel_tol);
    return std::fabs(analytic - fd) / denom;
}

bool fd_coord_pass(double analytic, double fd, double rel_tol, double abs_floor) {
    return fd_coord_score(analytic, fd, rel_tol, abs_floor) <= rel_tol;
}

GradCheckReport gradcheck(const ArchConfig& arch, uint64_t seed,
                          const GradCheckOptions& opt) {
    validate_arch(arch);
    const long volume = static_cast<long>(arch.layers) * arch.subbands * arch.filter_size *
                        arch.filter_size;
    if (volume > opt.budget)
        throw std::invalid_argument(
            "gradcheck: architecture exceeds the finite-difference budget (K*M*P^2 = " +
            std::to_string(volume) + " > " + std::to_string(opt.budget) + ")");
    if (opt.image_size % arch.stride != 0)
        throw std::invalid_argument("gradcheck: image size must be divisible by the stride");

    // one random instance: clean uniform noise texture, noisy observation
    Image clean(opt.image_size, opt.image_size);
    CounterRng img_rng(seed, StreamKind::Test, 0);
    for (double& v : clean.data) v = img_rng.next_double();
    CounterRng noise_rng(seed, StreamKind::Test, 1);
    Image noisy = add_awgn(clean, opt.sigma, noise_rng);

    ModelParams params = init_model(arch, seed);
    RealizedModel banks = realize_model(params);
    ForwardCache cache;
    Image xhat = forward(params, banks, noisy, opt.sigma, &cache);
    Image grad_out = mse_loss_grad(xhat, clean, 1.0);
    GradientSet analytic = backward(params, cache, grad_out);

    const std::vector<int> tags = family_tags(params);
    GradCheckReport rep;
    rep.coords = static_cast<int>(params.values.size());
    rep.pass = true;

    ModelParams probe = params;
    for (size_t i = 0; i < params.values.size(); ++i) {
        const double saved = probe.values[i];
        probe.values[i] = saved + opt.fd_step;
        const double fp = loss_at(probe, noisy, clean, opt.sigma);
        probe.values[i] = saved - opt.fd_step;
        const double fm = loss_at(probe, noisy, clean, opt.sigma);
        probe.values[i] = saved;
        const double fd = (fp - fm) / (2.0 * opt.fd_step);

        const double score = fd_coord_score(analytic[i], fd, opt.rel_tol, opt.abs_floor);
        if (score > rep.worst_score) {
            rep.worst_score = score;
            rep.worst_coord = i;
        }
        if (tags[i] >= 0 && score > rep.family_worst[tags[i]])
            rep.family_worst[tags[i]] = score;
        if (score > opt.rel_tol) rep.pass = false;
    }

    // tied gradients must equal the sum of the untied per-layer gradients at
    // identical parameter values
    if (arch.tied.alpha || arch.tied.scale || arch.tied.omega0 || arch.tied.psi ||
        arch.tied.thresholds) {
        rep.checked_ties = true;
        ArchConfig flat_arch = arch;
        flat_arch.tied = tie_none();
        ModelParams flat;
        flat.arch = flat_arch;
        flat.layout = ParamLayout(flat_arch);
        flat.values.assign(flat.layout.total(), 0.0);
        for (int bank = 0; bank < 3; ++bank)
            for (int k = 0; k < (bank == 2 ? 1 : arch.layers); ++k)
                for (int m = 0; m < arch.subbands; ++m)
                    for (int j = 0; j < arch.mog_order; ++j)
                        for (int c = 0; c < 6; ++c)
                            flat.values[flat.layout.atom(static_cast<Bank>(bank), k, m, j, c)] =
                                params.values[params.layout.atom(static_cast<Bank>(bank), k, m,
                                                                 j, c)];
        for (int k = 0; k < arch.layers; ++k)
            for (int m = 0; m < arch.subbands; ++m) {
                flat.values[flat.layout.tau0(k, m)] = params.values[params.layout.tau0(k, m)];
                if (arch.adaptive)
                    flat.values[flat.layout.tau1(k, m)] =
                        params.values[params.layout.tau1(k, m)];
            }

        RealizedModel flat_banks = realize_model(flat);
        ForwardCache flat_cache;
        Image flat_xhat = forward(flat, flat_banks, noisy, opt.sigma, &flat_cache);
        GradientSet untied = backward(flat, flat_cache, mse_loss_grad(flat_xhat, clean, 1.0));

        // accumulate the untied gradients through the tied layout and compare
        GradientSet folded(params.values.size(), 0.0);
        for (int bank = 0; bank < 3; ++bank)
            for (int k = 0; k < (bank == 2 ? 1 : arch.layers); ++k)
                for (int m = 0; m < arch.subbands; ++m)
                    for (int j = 0; j < arch.mog_order; ++j)
                        for (int c = 0; c < 6; ++c)
                            folded[params.layout.atom(static_cast<Bank>(bank), k, m, j, c)] +=
                                untied[flat.layout.atom(static_cast<Bank>(bank), k, m, j, c)];
        for (int k = 0; k < arch.layers; ++k)
            for (int m = 0; m < arch.subbands; ++m) {
                folded[params.layout.tau0(k, m)] += untied[flat.layout.tau0(k, m)];
                if (arch.adaptive)
                    folded[params.layout.tau1(k, m)] += untied[flat.layout.tau1(k, m)];
            }
        for (size_t i = 0; i < folded.size(); ++i) {
            const double err =
                std::fabs(folded[i] - analytic[i]) / std::max(1.0, std::fabs(folded[i]));
            rep.tie_sum_err = std::max(rep.tie_sum_err, err);
        }
    }
    return rep;
}

}  // namespace gdl
