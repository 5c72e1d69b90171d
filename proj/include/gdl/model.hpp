#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gdl/gabor.hpp"

namespace gdl {

// Parameter families that can be shared across the K unrolled layers. The
// final dictionary D always has its own storage regardless of tying.
struct TieConfig {
    bool alpha = false;
    bool scale = false;       // the (a1, a2) envelope precisions
    bool omega0 = false;      // the (w1, w2) carrier frequencies
    bool psi = false;
    bool thresholds = false;  // (tau0, tau1)

    bool operator==(const TieConfig&) const = default;
};

TieConfig tie_all();
TieConfig tie_none();

struct ArchConfig {
    int layers = 0;         // K
    int subbands = 0;       // M
    int stride = 1;         // s
    int filter_size = 0;    // P, odd
    int mog_order = 1;      // S
    bool adaptive = false;  // thresholds depend on the noise level
    TieConfig tied;

    bool operator==(const ArchConfig&) const = default;
};

void validate_arch(const ArchConfig& arch);  // throws std::invalid_argument

enum class Bank { Analysis = 0, Synthesis = 1, Dictionary = 2 };

// Gabor parameter families, per-atom component widths 1, 2, 2, 1.
enum class Family { Alpha = 0, Scale = 1, Omega = 2, Psi = 3 };

// Index map from (bank, layer, subband, atom, component) into one flat
// parameter vector. A tied family owns a single layer slot that every layer
// resolves to, so sharing is storage identity — not value equality — and
// gradients accumulated through the map sum over layers with no extra
// bookkeeping. Atom component order is (alpha, a1, a2, w1, w2, psi).
class ParamLayout {
public:
    ParamLayout() = default;
    explicit ParamLayout(const ArchConfig& arch);

    size_t total() const { return total_; }
    int family_slots(Family f) const;  // 1 if tied, else K
    int threshold_slots() const;

    size_t atom(Bank bank, int layer, int m, int atom_idx, int component) const;
    size_t tau0(int layer, int m) const;
    size_t tau1(int layer, int m) const;  // adaptive models only

    // Gabor parameters occupy [0, threshold_offset); thresholds the rest.
    size_t threshold_offset() const { return tau0_off_; }

private:
    ArchConfig arch_;
    size_t fam_off_[3][4] = {};  // [bank][family]
    size_t tau0_off_ = 0;
    size_t tau1_off_ = 0;
    size_t total_ = 0;
};

struct ModelParams {
    ArchConfig arch;
    ParamLayout layout;
    std::vector<double> values;
};

// Per-layer filterbanks realized from the current parameters, ties resolved.
struct RealizedModel {
    std::vector<RealizedFilterbank> analysis;
    std::vector<RealizedFilterbank> synthesis;
    RealizedFilterbank dictionary;
};

/// Total learnable parameter count; tied families counted once.
size_t count_params(const ArchConfig& arch);

/// One shared random draw for all 2K+1 filterbanks, rescaled so the realized
/// dictionary starts with unit squared spectral norm; tau0 = 1e-2, tau1 = 0.
ModelParams init_model(const ArchConfig& arch, uint64_t seed);

/// Extract the generative spec of one bank, reading through the tie map.
FilterbankSpec bank_spec(const ModelParams& params, Bank bank, int layer);

/// Write a spec's atoms into one bank's slots of the flat vector.
void store_bank_spec(ModelParams& params, Bank bank, int layer, const FilterbankSpec& spec);

/// Realize every filterbank of the model from the current parameter vector.
RealizedModel realize_model(const ModelParams& params);

/// tau^k = tau0^k + tau1^k * (sigma / 255), sigma on the 0-255 scale.
/// Non-adaptive models carry no tau1 storage, so tau = tau0 for any sigma.
std::vector<double> layer_thresholds(const ModelParams& params, int layer, double sigma);

}  // namespace gdl
