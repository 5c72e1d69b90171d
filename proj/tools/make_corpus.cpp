// Deterministic synthetic grayscale corpus: smooth gradients, anti-aliased
// shapes and oriented gratings, sized for 64x64 training crops. Regenerating
// with the same seed reproduces the shipped files byte for byte.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gdl/image_io.hpp"
#include "gdl/rng.hpp"

namespace fs = std::filesystem;
using gdl::CounterRng;
using gdl::Image;

namespace {

constexpr int kSize = 160;
constexpr int kCount = 16;  // 12 train / 2 val / 2 test
constexpr uint64_t kSeed = 7;
constexpr double kPi = 3.14159265358979323846;

double smoothstep(double e0, double e1, double x) {
    double t = (x - e0) / (e1 - e0);
    if (t < 0.0) t = 0.0;
    if (t > 1.0) t = 1.0;
    return t * t * (3.0 - 2.0 * t);
}

Image make_image(int index) {
    CounterRng rng(kSeed, gdl::StreamKind::Corpus, static_cast<uint64_t>(index));
    Image img(kSize, kSize);

    // smooth background: bias plus two low-frequency waves
    const double bias = rng.uniform(0.35, 0.65);
    struct Wave {
        double amp, kx, ky, phase;
    };
    Wave waves[2];
    for (auto& w : waves) {
        const double cycles = rng.uniform(0.5, 1.5);
        const double theta = rng.uniform(0.0, 2.0 * kPi);
        w.amp = rng.uniform(0.05, 0.15);
        w.kx = 2.0 * kPi * cycles / kSize * std::cos(theta);
        w.ky = 2.0 * kPi * cycles / kSize * std::sin(theta);
        w.phase = rng.uniform(0.0, 2.0 * kPi);
    }
    for (int i = 0; i < kSize; ++i)
        for (int j = 0; j < kSize; ++j) {
            double v = bias;
            for (const auto& w : waves) v += w.amp * std::sin(w.kx * j + w.ky * i + w.phase);
            img.at(i, j) = v;
        }

    // anti-aliased shapes: soft-edged discs and rotated rectangles
    const int shapes = 3 + static_cast<int>(rng.next_below(4));
    for (int s = 0; s < shapes; ++s) {
        const bool disc = rng.next_below(2) == 0;
        const double cx = rng.uniform(15.0, kSize - 15.0);
        const double cy = rng.uniform(15.0, kSize - 15.0);
        const double delta = rng.uniform(-0.35, 0.35);
        if (disc) {
            const double r = rng.uniform(10.0, 35.0);
            for (int i = 0; i < kSize; ++i)
                for (int j = 0; j < kSize; ++j) {
                    const double d = std::hypot(j - cx, i - cy);
                    img.at(i, j) += delta * (1.0 - smoothstep(r - 1.0, r + 1.0, d));
                }
        } else {
            const double hw = rng.uniform(8.0, 30.0);
            const double hh = rng.uniform(8.0, 30.0);
            const double ang = rng.uniform(0.0, kPi);
            const double ca = std::cos(ang), sa = std::sin(ang);
            for (int i = 0; i < kSize; ++i)
                for (int j = 0; j < kSize; ++j) {
                    const double u = ca * (j - cx) + sa * (i - cy);
                    const double v = -sa * (j - cx) + ca * (i - cy);
                    const double d = std::max(std::fabs(u) - hw, std::fabs(v) - hh);
                    img.at(i, j) += delta * (1.0 - smoothstep(-1.0, 1.0, d));
                }
        }
    }

    // oriented gratings inside soft discs
    const int gratings = 1 + static_cast<int>(rng.next_below(2));
    for (int t = 0; t < gratings; ++t) {
        const double cx = rng.uniform(25.0, kSize - 25.0);
        const double cy = rng.uniform(25.0, kSize - 25.0);
        const double r = rng.uniform(15.0, 30.0);
        const double freq = rng.uniform(0.3, 1.2);
        const double theta = rng.uniform(0.0, kPi);
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double amp = rng.uniform(0.08, 0.2);
        const double kx = freq * std::cos(theta), ky = freq * std::sin(theta);
        for (int i = 0; i < kSize; ++i)
            for (int j = 0; j < kSize; ++j) {
                const double d = std::hypot(j - cx, i - cy);
                const double mask = 1.0 - smoothstep(r - 2.0, r + 2.0, d);
                if (mask > 0.0)
                    img.at(i, j) += amp * mask * std::sin(kx * j + ky * i + phase);
            }
    }

    for (double& v : img.data) {
        if (v < 0.02) v = 0.02;
        if (v > 0.98) v = 0.98;
    }
    return img;
}

void write_manifest(const std::string& path, const std::string& split, int lo, int hi) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << "# desk corpus, " << split << " split\n";
    for (int i = lo; i < hi; ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "../desk/desk_%02d.pgm", i);
        out << name << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    const std::string img_dir = argc > 1 ? argv[1] : "data/desk";
    const std::string man_dir = argc > 2 ? argv[2] : "data/manifests";
    try {
        fs::create_directories(img_dir);
        fs::create_directories(man_dir);
        for (int i = 0; i < kCount; ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "%s/desk_%02d.pgm", img_dir.c_str(), i);
            gdl::save_pgm(make_image(i), name);
        }
        write_manifest(man_dir + "/desk_train.txt", "train", 0, 12);
        write_manifest(man_dir + "/desk_val.txt", "val", 12, 14);
        write_manifest(man_dir + "/desk_test.txt", "test", 14, 16);
        std::cout << "wrote " << kCount << " images to " << img_dir << " and manifests to "
                  << man_dir << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
