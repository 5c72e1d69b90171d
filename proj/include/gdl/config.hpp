#pragma once

#include <cstdint>
#include <string>

#include "gdl/model.hpp"

namespace gdl {

struct TrainSettings {
    double sigma_lo = 25.0;
    double sigma_hi = 25.0;
    int batch = 8;
    int crop = 64;
    long steps = 20000;
    uint64_t seed = 1;
    double lr_gabor = 1e-3;
    double lr_thresh = 1e-4;
    double lr_min = 1e-6;
    double clip_norm = 100.0;
    long val_every = 500;

    bool operator==(const TrainSettings&) const = default;
};

struct DataSettings {
    std::string train_manifest;
    std::string val_manifest;

    bool operator==(const DataSettings&) const = default;
};

struct OutSettings {
    std::string dir = "runs/out";
    std::string name = "model";

    bool operator==(const OutSettings&) const = default;
};

struct RunConfig {
    ArchConfig arch;
    TrainSettings train;
    DataSettings data;
    OutSettings out;

    bool operator==(const RunConfig&) const = default;
};

/// Parse and validate a sectioned key = value file. Every rejection names
/// the offending field and carries "origin:line:" provenance. Sections:
/// [arch] (required), [train], [data], [out].
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

/// Canonical text form; parse_config_text(format_config(c)) reproduces c.
std::string format_config(const RunConfig& cfg);

/// "none", "all", or a comma list drawn from alpha,a,omega0,psi,thresholds.
TieConfig parse_tie(const std::string& text);
std::string format_tie(const TieConfig& tie);

}  // namespace gdl
