#include "gdl/config.hpp"

#include <charconv>
#include <filesystem>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace gdl {

namespace {

std::string trim(const std::string& s) {
    const size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

long parse_long(const std::string& v, const std::string& origin, int line,
                const std::string& key) {
    long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        fail(origin, line, key + ": integer expected, got '" + v + "'");
    return out;
}

uint64_t parse_u64(const std::string& v, const std::string& origin, int line,
                   const std::string& key) {
    uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size())
        fail(origin, line, key + ": unsigned integer expected, got '" + v + "'");
    return out;
}

double parse_double(const std::string& v, const std::string& origin, int line,
                    const std::string& key) {
    try {
        size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        fail(origin, line, key + ": number expected, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& origin, int line,
                const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(origin, line, key + ": boolean expected (true/false), got '" + v + "'");
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char probe[64];
        std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
        if (std::stod(probe) == v) return probe;
    }
    return buf;
}

}  // namespace

TieConfig parse_tie(const std::string& text) {
    const std::string v = trim(text);
    if (v == "none" || v.empty()) return tie_none();
    if (v == "all") return tie_all();
    TieConfig t;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const std::string name = trim(tok);
        if (name == "alpha") t.alpha = true;
        else if (name == "a") t.scale = true;
        else if (name == "omega0") t.omega0 = true;
        else if (name == "psi") t.psi = true;
        else if (name == "thresholds") t.thresholds = true;
        else
            throw std::runtime_error(
                "tied: unknown family '" + name +
                "' (expected alpha, a, omega0, psi, thresholds, all or none)");
    }
    return t;
}

std::string format_tie(const TieConfig& tie) {
    if (tie == tie_none()) return "none";
    if (tie == tie_all()) return "all";
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += ",";
        out += name;
    };
    add(tie.alpha, "alpha");
    add(tie.scale, "a");
    add(tie.omega0, "omega0");
    add(tie.psi, "psi");
    add(tie.thresholds, "thresholds");
    return out;
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    cfg.arch = ArchConfig{};
    cfg.arch.layers = 0;  // required fields start unset

    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool saw_arch = false;
    std::map<std::string, int> key_line;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = raw;
        const size_t hash = s.find('#');
        if (hash != std::string::npos) s.erase(hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') fail(origin, line, "unterminated section header");
            section = s.substr(1, s.size() - 2);
            if (section != "arch" && section != "train" && section != "data" &&
                section != "out")
                fail(origin, line, "unknown section [" + section + "]");
            if (section == "arch") saw_arch = true;
            continue;
        }
        const size_t eq = s.find('=');
        if (eq == std::string::npos) fail(origin, line, "expected key = value, got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty()) fail(origin, line, "key '" + key + "' outside any section");
        key_line[section + "." + key] = line;

        if (section == "arch") {
            if (key == "layers") cfg.arch.layers = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "subbands") cfg.arch.subbands = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "stride") cfg.arch.stride = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "filter_size") cfg.arch.filter_size = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "mog_order") cfg.arch.mog_order = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "adaptive") cfg.arch.adaptive = parse_bool(val, origin, line, key);
            else if (key == "tied") {
                try {
                    cfg.arch.tied = parse_tie(val);
                } catch (const std::exception& e) {
                    fail(origin, line, e.what());
                }
            } else fail(origin, line, "unknown key '" + key + "' in [arch]");
        } else if (section == "train") {
            if (key == "sigma_lo") cfg.train.sigma_lo = parse_double(val, origin, line, key);
            else if (key == "sigma_hi") cfg.train.sigma_hi = parse_double(val, origin, line, key);
            else if (key == "batch") cfg.train.batch = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "crop") cfg.train.crop = static_cast<int>(parse_long(val, origin, line, key));
            else if (key == "steps") cfg.train.steps = parse_long(val, origin, line, key);
            else if (key == "seed") cfg.train.seed = parse_u64(val, origin, line, key);
            else if (key == "lr_gabor") cfg.train.lr_gabor = parse_double(val, origin, line, key);
            else if (key == "lr_thresh") cfg.train.lr_thresh = parse_double(val, origin, line, key);
            else if (key == "lr_min") cfg.train.lr_min = parse_double(val, origin, line, key);
            else if (key == "clip_norm") cfg.train.clip_norm = parse_double(val, origin, line, key);
            else if (key == "val_every") cfg.train.val_every = parse_long(val, origin, line, key);
            else fail(origin, line, "unknown key '" + key + "' in [train]");
        } else if (section == "data") {
            if (key == "train_manifest") cfg.data.train_manifest = val;
            else if (key == "val_manifest") cfg.data.val_manifest = val;
            else fail(origin, line, "unknown key '" + key + "' in [data]");
        } else {  // out
            if (key == "dir") cfg.out.dir = val;
            else if (key == "name") cfg.out.name = val;
            else fail(origin, line, "unknown key '" + key + "' in [out]");
        }
    }

    auto where = [&](const std::string& qualified) {
        const auto it = key_line.find(qualified);
        return it == key_line.end() ? line : it->second;
    };

    if (!saw_arch) fail(origin, line, "missing required section [arch]");
    if (cfg.arch.layers < 1) fail(origin, where("arch.layers"), "layers must be >= 1");
    if (cfg.arch.subbands < 1) fail(origin, where("arch.subbands"), "subbands must be >= 1");
    if (cfg.arch.stride != 1 && cfg.arch.stride != 2 && cfg.arch.stride != 4)
        fail(origin, where("arch.stride"), "stride must be one of 1, 2, 4");
    if (cfg.arch.filter_size < 1 || cfg.arch.filter_size % 2 == 0)
        fail(origin, where("arch.filter_size"), "filter_size must be a positive odd integer");
    if (cfg.arch.mog_order < 1) fail(origin, where("arch.mog_order"), "mog_order must be >= 1");
    if (cfg.train.sigma_lo < 0.0 || cfg.train.sigma_hi > 255.0 ||
        cfg.train.sigma_lo > cfg.train.sigma_hi)
        fail(origin, where("train.sigma_hi"),
             "sigma range must satisfy 0 <= sigma_lo <= sigma_hi <= 255");
    if (cfg.train.batch < 1) fail(origin, where("train.batch"), "batch must be >= 1");
    if (cfg.train.crop < cfg.arch.stride || cfg.train.crop % cfg.arch.stride != 0)
        fail(origin, where("train.crop"), "crop must be a positive multiple of the stride");
    if (cfg.train.steps < 1) fail(origin, where("train.steps"), "steps must be >= 1");
    if (cfg.train.lr_gabor <= 0.0) fail(origin, where("train.lr_gabor"), "lr_gabor must be > 0");
    if (cfg.train.lr_thresh <= 0.0)
        fail(origin, where("train.lr_thresh"), "lr_thresh must be > 0");
    if (cfg.train.lr_min < 0.0) fail(origin, where("train.lr_min"), "lr_min must be >= 0");
    if (cfg.train.clip_norm < 0.0)
        fail(origin, where("train.clip_norm"), "clip_norm must be >= 0");
    if (cfg.train.val_every < 1) fail(origin, where("train.val_every"), "val_every must be >= 1");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open config");
    std::ostringstream ss;
    ss << in.rdbuf();
    RunConfig cfg = parse_config_text(ss.str(), path);
    // manifest paths resolve against the config file's directory, the same
    // way manifests resolve their image paths
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (p.empty()) return;
        std::filesystem::path fp(p);
        if (fp.is_relative()) p = (base / fp).lexically_normal().string();
    };
    resolve(cfg.data.train_manifest);
    resolve(cfg.data.val_manifest);
    return cfg;
}

std::string format_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "[arch]\n";
    out << "layers = " << cfg.arch.layers << "\n";
    out << "subbands = " << cfg.arch.subbands << "\n";
    out << "stride = " << cfg.arch.stride << "\n";
    out << "filter_size = " << cfg.arch.filter_size << "\n";
    out << "mog_order = " << cfg.arch.mog_order << "\n";
    out << "adaptive = " << (cfg.arch.adaptive ? "true" : "false") << "\n";
    out << "tied = " << format_tie(cfg.arch.tied) << "\n";
    out << "\n[train]\n";
    out << "sigma_lo = " << fmt_double(cfg.train.sigma_lo) << "\n";
    out << "sigma_hi = " << fmt_double(cfg.train.sigma_hi) << "\n";
    out << "batch = " << cfg.train.batch << "\n";
    out << "crop = " << cfg.train.crop << "\n";
    out << "steps = " << cfg.train.steps << "\n";
    out << "seed = " << cfg.train.seed << "\n";
    out << "lr_gabor = " << fmt_double(cfg.train.lr_gabor) << "\n";
    out << "lr_thresh = " << fmt_double(cfg.train.lr_thresh) << "\n";
    out << "lr_min = " << fmt_double(cfg.train.lr_min) << "\n";
    out << "clip_norm = " << fmt_double(cfg.train.clip_norm) << "\n";
    out << "val_every = " << cfg.train.val_every << "\n";
    if (!cfg.data.train_manifest.empty() || !cfg.data.val_manifest.empty()) {
        out << "\n[data]\n";
        if (!cfg.data.train_manifest.empty())
            out << "train_manifest = " << cfg.data.train_manifest << "\n";
        if (!cfg.data.val_manifest.empty())
            out << "val_manifest = " << cfg.data.val_manifest << "\n";
    }
    out << "\n[out]\n";
    out << "dir = " << cfg.out.dir << "\n";
    out << "name = " << cfg.out.name << "\n";
    return out.str();
}

}  // namespace gdl
