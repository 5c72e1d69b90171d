#include "gdl/image_io.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace gdl {

namespace {

// next whitespace-delimited header token, skipping '#' comments
std::string next_token(std::istream& in) {
    std::string tok;
    int ch;
    while ((ch = in.get()) != EOF) {
        if (ch == '#') {
            while ((ch = in.get()) != EOF && ch != '\n') {}
            continue;
        }
        if (std::isspace(ch)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(ch));
    }
    return tok;
}

int parse_dim(const std::string& tok, const std::string& path, const char* what) {
    size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(tok, &used);
    } catch (const std::exception&) {
        throw std::runtime_error(path + ": malformed PGM " + what);
    }
    if (used != tok.size() || v <= 0)
        throw std::runtime_error(path + ": malformed PGM " + what);
    return v;
}

}  // namespace

Image load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::string magic = next_token(in);
    if (magic == "P6" || magic == "P3")
        throw std::runtime_error(path + ": color image rejected (grayscale task)");
    if (magic != "P5")
        throw std::runtime_error(path + ": unsupported format (binary PGM P5 required)");
    const int w = parse_dim(next_token(in), path, "width");
    const int h = parse_dim(next_token(in), path, "height");
    const int maxval = parse_dim(next_token(in), path, "maxval");
    if (maxval != 255)
        throw std::runtime_error(path + ": unsupported bit depth (maxval must be 255)");
    // the single whitespace byte after maxval was consumed by next_token

    std::vector<uint8_t> bytes(static_cast<size_t>(w) * h);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (static_cast<size_t>(in.gcount()) != bytes.size())
        throw std::runtime_error(path + ": truncated pixel payload");

    Image img(h, w);
    for (size_t n = 0; n < bytes.size(); ++n) img.data[n] = bytes[n] / 255.0;
    return img;
}

void save_pgm(const Image& img, const std::string& path) {
    if (img.height < 1 || img.width < 1)
        throw std::invalid_argument("save_pgm: empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<uint8_t> bytes(img.data.size());
    for (size_t n = 0; n < bytes.size(); ++n) {
        double v = img.data[n];
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        bytes[n] = static_cast<uint8_t>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace gdl
