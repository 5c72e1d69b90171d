#include "gdl/data.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace gdl {

Dataset load_manifest(const std::string& manifest_path, const std::string& split) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error(manifest_path + ": cannot open manifest");
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    Dataset ds;
    ds.split = split;
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const size_t e = line.find_last_not_of(" \t\r");
        std::filesystem::path p(line.substr(b, e - b + 1));
        if (p.is_relative()) p = base / p;
        ds.paths.push_back(p.lexically_normal().string());
    }
    return ds;
}

Image add_awgn(const Image& x, double sigma, CounterRng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("add_awgn: sigma must be >= 0");
    Image y = x;
    if (sigma == 0.0) return y;
    const double s = sigma / 255.0;
    for (double& v : y.data) v += s * rng.next_gaussian();
    return y;
}

Image dihedral(const Image& img, int op) {
    if (op < 0 || op >= 8) throw std::invalid_argument("dihedral: op must be in [0, 8)");
    if (img.height != img.width) throw std::invalid_argument("dihedral: square input required");
    const int n = img.height;
    Image out(n, n);
    const int rot = op & 3;
    const bool flip = op >= 4;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            // invert the output transform to find the source pixel: undo the
            // flip, then the rotation (90-degree CCW maps (r, c) -> (n-1-c, r))
            const int fj = flip ? n - 1 - j : j;
            int si = i, sj = fj;
            switch (rot) {
                case 0: break;
                case 1: si = fj; sj = n - 1 - i; break;
                case 2: si = n - 1 - i; sj = n - 1 - fj; break;
                case 3: si = n - 1 - fj; sj = i; break;
            }
            out.at(i, j) = img.at(si, sj);
        }
    return out;
}

Image sample_patch(const Image& x, int size, CounterRng& rng, bool augment) {
    if (size < 1 || size > x.height || size > x.width)
        throw std::invalid_argument("sample_patch: image smaller than the requested crop");
    const int i0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(x.height - size + 1)));
    const int j0 = static_cast<int>(rng.next_below(static_cast<uint64_t>(x.width - size + 1)));
    Image patch(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) patch.at(i, j) = x.at(i0 + i, j0 + j);
    if (!augment) return patch;
    return dihedral(patch, static_cast<int>(rng.next_below(8)));
}

}  // namespace gdl
