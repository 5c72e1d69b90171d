#include "gdl/model.hpp"

#include <stdexcept>

namespace gdl {

namespace {

constexpr int kFamilyWidth[4] = {1, 2, 2, 1};

bool family_tied(const TieConfig& t, Family f) {
    switch (f) {
        case Family::Alpha: return t.alpha;
        case Family::Scale: return t.scale;
        case Family::Omega: return t.omega0;
        case Family::Psi: return t.psi;
    }
    return false;
}

}  // namespace

TieConfig tie_all() { return TieConfig{true, true, true, true, true}; }
TieConfig tie_none() { return TieConfig{}; }

void validate_arch(const ArchConfig& arch) {
    if (arch.layers < 1) throw std::invalid_argument("arch: layers must be >= 1");
    if (arch.subbands < 1) throw std::invalid_argument("arch: subbands must be >= 1");
    if (arch.stride != 1 && arch.stride != 2 && arch.stride != 4)
        throw std::invalid_argument("arch: stride must be 1, 2 or 4");
    if (arch.filter_size < 1 || arch.filter_size % 2 == 0)
        throw std::invalid_argument("arch: filter_size must be a positive odd integer");
    if (arch.mog_order < 1) throw std::invalid_argument("arch: mog_order must be >= 1");
}

ParamLayout::ParamLayout(const ArchConfig& arch) : arch_(arch) {
    validate_arch(arch);
    const size_t atoms = static_cast<size_t>(arch.subbands) * arch.mog_order;
    size_t off = 0;
    for (int b = 0; b < 3; ++b)
        for (int f = 0; f < 4; ++f) {
            fam_off_[b][f] = off;
            const int slots =
                (b == static_cast<int>(Bank::Dictionary))
                    ? 1
                    : (family_tied(arch.tied, static_cast<Family>(f)) ? 1 : arch.layers);
            off += static_cast<size_t>(slots) * kFamilyWidth[f] * atoms;
        }
    tau0_off_ = off;
    const int tslots = arch.tied.thresholds ? 1 : arch.layers;
    off += static_cast<size_t>(tslots) * arch.subbands;
    tau1_off_ = off;
    if (arch.adaptive) off += static_cast<size_t>(tslots) * arch.subbands;
    total_ = off;
}

int ParamLayout::family_slots(Family f) const {
    return family_tied(arch_.tied, f) ? 1 : arch_.layers;
}

int ParamLayout::threshold_slots() const { return arch_.tied.thresholds ? 1 : arch_.layers; }

size_t ParamLayout::atom(Bank bank, int layer, int m, int atom_idx, int component) const {
    Family f;
    int pos_in_atom;
    switch (component) {
        case 0: f = Family::Alpha; pos_in_atom = 0; break;
        case 1: f = Family::Scale; pos_in_atom = 0; break;
        case 2: f = Family::Scale; pos_in_atom = 1; break;
        case 3: f = Family::Omega; pos_in_atom = 0; break;
        case 4: f = Family::Omega; pos_in_atom = 1; break;
        case 5: f = Family::Psi; pos_in_atom = 0; break;
        default: throw std::out_of_range("ParamLayout::atom: component must be in [0, 6)");
    }
    const int width = kFamilyWidth[static_cast<int>(f)];
    const size_t atoms = static_cast<size_t>(arch_.subbands) * arch_.mog_order;
    int slot = 0;
    if (bank != Bank::Dictionary && !family_tied(arch_.tied, f)) slot = layer;
    const size_t block = static_cast<size_t>(width) * atoms;
    const size_t pos =
        (static_cast<size_t>(m) * arch_.mog_order + atom_idx) * width + pos_in_atom;
    return fam_off_[static_cast<int>(bank)][static_cast<int>(f)] + slot * block + pos;
}

size_t ParamLayout::tau0(int layer, int m) const {
    const int slot = arch_.tied.thresholds ? 0 : layer;
    return tau0_off_ + static_cast<size_t>(slot) * arch_.subbands + m;
}

size_t ParamLayout::tau1(int layer, int m) const {
    if (!arch_.adaptive) throw std::logic_error("ParamLayout::tau1: model is not adaptive");
    const int slot = arch_.tied.thresholds ? 0 : layer;
    return tau1_off_ + static_cast<size_t>(slot) * arch_.subbands + m;
}

size_t count_params(const ArchConfig& arch) { return ParamLayout(arch).total(); }

FilterbankSpec bank_spec(const ModelParams& params, Bank bank, int layer) {
    const ArchConfig& arch = params.arch;
    FilterbankSpec spec;
    spec.filter_size = arch.filter_size;
    spec.subbands.resize(arch.subbands);
    for (int m = 0; m < arch.subbands; ++m) {
        auto& sb = spec.subbands[m];
        sb.atoms.resize(arch.mog_order);
        for (int j = 0; j < arch.mog_order; ++j) {
            GaborParams& phi = sb.atoms[j];
            phi.alpha = params.values[params.layout.atom(bank, layer, m, j, 0)];
            phi.a1 = params.values[params.layout.atom(bank, layer, m, j, 1)];
            phi.a2 = params.values[params.layout.atom(bank, layer, m, j, 2)];
            phi.w1 = params.values[params.layout.atom(bank, layer, m, j, 3)];
            phi.w2 = params.values[params.layout.atom(bank, layer, m, j, 4)];
            phi.psi = params.values[params.layout.atom(bank, layer, m, j, 5)];
        }
    }
    return spec;
}

void store_bank_spec(ModelParams& params, Bank bank, int layer, const FilterbankSpec& spec) {
    const ArchConfig& arch = params.arch;
    if (spec.num_subbands() != arch.subbands || spec.mog_order() != arch.mog_order ||
        spec.filter_size != arch.filter_size)
        throw std::invalid_argument("store_bank_spec: spec does not match the architecture");
    for (int m = 0; m < arch.subbands; ++m)
        for (int j = 0; j < arch.mog_order; ++j) {
            const GaborParams& phi = spec.subbands[m].atoms[j];
            const double comp[6] = {phi.alpha, phi.a1, phi.a2, phi.w1, phi.w2, phi.psi};
            for (int c = 0; c < 6; ++c)
                params.values[params.layout.atom(bank, layer, m, j, c)] = comp[c];
        }
}

RealizedModel realize_model(const ModelParams& params) {
    RealizedModel rm;
    rm.analysis.reserve(params.arch.layers);
    rm.synthesis.reserve(params.arch.layers);
    for (int k = 0; k < params.arch.layers; ++k) {
        rm.analysis.push_back(realize_filterbank(bank_spec(params, Bank::Analysis, k)));
        rm.synthesis.push_back(realize_filterbank(bank_spec(params, Bank::Synthesis, k)));
    }
    rm.dictionary = realize_filterbank(bank_spec(params, Bank::Dictionary, 0));
    return rm;
}

std::vector<double> layer_thresholds(const ModelParams& params, int layer, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("layer_thresholds: sigma must be >= 0");
    const ArchConfig& arch = params.arch;
    std::vector<double> tau(arch.subbands);
    for (int m = 0; m < arch.subbands; ++m) {
        double t = params.values[params.layout.tau0(layer, m)];
        if (arch.adaptive) t += params.values[params.layout.tau1(layer, m)] * (sigma / 255.0);
        tau[m] = t;
    }
    return tau;
}

ModelParams init_model(const ArchConfig& arch, uint64_t seed) {
    validate_arch(arch);
    ModelParams params;
    params.arch = arch;
    params.layout = ParamLayout(arch);
    params.values.assign(params.layout.total(), 0.0);

    CounterRng draw_rng(seed, StreamKind::Init, 0);
    FilterbankSpec draw =
        init_filterbank(draw_rng, arch.subbands, arch.mog_order, arch.filter_size);

    // rescale the shared draw so the realized bank has unit squared spectral
    // norm; probe is an M x 32 x 32 subband tensor
    CounterRng probe_rng(seed, StreamKind::Spectral, 0);
    SpectralNormResult sn =
        spectral_norm(realize_filterbank(draw), arch.stride, 32 * arch.stride,
                      32 * arch.stride, 100, 1e-6, probe_rng);
    if (!(sn.value > 0.0))
        throw std::runtime_error("init_model: degenerate draw with zero spectral norm");
    FilterbankSpec scaled = normalize_scales(draw, sn.value);

    for (int k = 0; k < arch.layers; ++k) {
        store_bank_spec(params, Bank::Analysis, k, scaled);
        store_bank_spec(params, Bank::Synthesis, k, scaled);
    }
    store_bank_spec(params, Bank::Dictionary, 0, scaled);

    for (int k = 0; k < arch.layers; ++k)
        for (int m = 0; m < arch.subbands; ++m) {
            params.values[params.layout.tau0(k, m)] = 1e-2;
            if (arch.adaptive) params.values[params.layout.tau1(k, m)] = 0.0;
        }
    return params;
}

}  // namespace gdl
