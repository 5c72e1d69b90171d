#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gdl {

// Grayscale image, row-major H x W. Clean images live in [0,1]; noisy
// tensors may exceed that range and are never clipped mid-pipeline.
struct Image {
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Image() = default;
    Image(int h, int w) : height(h), width(w), data(static_cast<size_t>(h) * w, 0.0) {}

    double& at(int i, int j) { return data[static_cast<size_t>(i) * width + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * width + j]; }
    double* row(int i) { return data.data() + static_cast<size_t>(i) * width; }
    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * width; }
    size_t size() const { return data.size(); }
    bool same_shape(const Image& o) const { return height == o.height && width == o.width; }
};

// M-channel subband stack, channel-major then row-major: [m][i][j].
struct Subband {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> data;

    Subband() = default;
    Subband(int m, int h, int w)
        : channels(m), height(h), width(w),
          data(static_cast<size_t>(m) * h * w, 0.0) {}

    double& at(int m, int i, int j) {
        return data[(static_cast<size_t>(m) * height + i) * width + j];
    }
    double at(int m, int i, int j) const {
        return data[(static_cast<size_t>(m) * height + i) * width + j];
    }
    double* plane(int m) { return data.data() + static_cast<size_t>(m) * height * width; }
    const double* plane(int m) const {
        return data.data() + static_cast<size_t>(m) * height * width;
    }
    size_t size() const { return data.size(); }
    bool same_shape(const Subband& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace gdl
