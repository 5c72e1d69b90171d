#include "gdl/model_io.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gdl {

namespace {

constexpr const char* kMagic = "GDLNET-MODEL 1";
constexpr const char* kProvMarker = "#--- provenance";

void put_le64(std::ostream& out, uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

uint64_t get_le64(std::istream& in, const std::string& path) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (in.gcount() != 8) throw std::runtime_error(path + ": truncated parameter payload");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

}  // namespace

void save_model(const ModelFile& mf, const std::string& path) {
    if (mf.params.values.size() != count_params(mf.config.arch))
        throw std::invalid_argument("save_model: parameter vector does not match the config");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << kMagic << "\n";
    out << format_config(mf.config);
    out << "\n" << kProvMarker << "\n";
    out << "seed = " << mf.prov.seed << "\n";
    out << "steps = " << mf.prov.steps << "\n";
    out << "manifest_hash = " << mf.prov.manifest_hash << "\n";
    out << "best_step = " << mf.prov.best_step << "\n";
    out << "best_val_psnr = " << fmt_double(mf.prov.best_val_psnr) << "\n";
    out << "DATA " << mf.params.values.size() << "\n";
    for (double v : mf.params.values) put_le64(out, std::bit_cast<uint64_t>(v));
    if (!out) throw std::runtime_error(path + ": write failed");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open model file");
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw std::runtime_error(path + ": not a model file (bad magic)");

    std::ostringstream config_text;
    bool in_prov = false;
    ModelFile mf;
    size_t count = 0;
    bool saw_data = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == kProvMarker) {
            in_prov = true;
            continue;
        }
        if (line.rfind("DATA ", 0) == 0) {
            count = std::stoull(line.substr(5));
            saw_data = true;
            break;
        }
        if (!in_prov) {
            config_text << line << "\n";
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const size_t b = s.find_first_not_of(" \t");
            if (b == std::string::npos) return std::string();
            const size_t e = s.find_last_not_of(" \t");
            return s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key == "seed") mf.prov.seed = std::stoull(val);
        else if (key == "steps") mf.prov.steps = std::stol(val);
        else if (key == "manifest_hash") mf.prov.manifest_hash = val;
        else if (key == "best_step") mf.prov.best_step = std::stol(val);
        else if (key == "best_val_psnr") mf.prov.best_val_psnr = std::stod(val);
        else throw std::runtime_error(path + ": unknown provenance key '" + key + "'");
    }
    if (!saw_data) throw std::runtime_error(path + ": missing DATA section");

    mf.config = parse_config_text(config_text.str(), path + " (embedded config)");
    if (count != count_params(mf.config.arch))
        throw std::runtime_error(path + ": parameter count does not match the config");

    mf.params.arch = mf.config.arch;
    mf.params.layout = ParamLayout(mf.config.arch);
    mf.params.values.resize(count);
    for (size_t i = 0; i < count; ++i)
        mf.params.values[i] = std::bit_cast<double>(get_le64(in, path));
    return mf;
}

std::string fnv1a_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for hashing");
    uint64_t h = 14695981039346656037ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

}  // namespace gdl
