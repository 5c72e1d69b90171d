#pragma once

#include <cstdint>
#include <string>

#include "gdl/config.hpp"

namespace gdl {

struct Provenance {
    uint64_t seed = 0;
    long steps = 0;
    std::string manifest_hash = "0";  // FNV-1a of the training manifest bytes
    long best_step = -1;
    double best_val_psnr = 0.0;

    bool operator==(const Provenance&) const = default;
};

struct ModelFile {
    RunConfig config;
    Provenance prov;
    ModelParams params;
};

/// Text header (magic + version, the canonical config, provenance), then
/// "DATA <count>" and the flat parameter vector as little-endian 64-bit
/// floats. save -> load reproduces every parameter bit-exactly.
void save_model(const ModelFile& mf, const std::string& path);
ModelFile load_model(const std::string& path);

/// FNV-1a 64-bit hash of a file's bytes, lowercase hex.
std::string fnv1a_file_hex(const std::string& path);

}  // namespace gdl
