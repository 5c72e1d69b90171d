#pragma once

#include <string>
#include <vector>

#include "gdl/rng.hpp"
#include "gdl/tensor.hpp"

namespace gdl {

// An ordered list of image paths belonging to one split. Shuffling is owned
// by the training loop so the dataset itself stays immutable.
struct Dataset {
    std::vector<std::string> paths;
    std::string split;
};

/// Read a manifest: one path per line, '#' comments, blank lines ignored;
/// relative paths resolve against the manifest's directory.
Dataset load_manifest(const std::string& manifest_path, const std::string& split);

/// y = x + n with n i.i.d. Gaussian of standard deviation sigma/255 (sigma
/// on the 0-255 scale). Never clipped: clipping would bias the noise model.
Image add_awgn(const Image& x, double sigma, CounterRng& rng);

/// Uniform random crop of size x size; when augment is set, one of the 8
/// dihedral transforms (flips and 90-degree rotations) is applied. Draw
/// order: row origin, column origin, transform index.
Image sample_patch(const Image& x, int size, CounterRng& rng, bool augment);

/// Apply dihedral transform op in [0, 8): op & 3 quarter-turn rotations
/// counterclockwise, then a horizontal flip when op >= 4. Square input.
Image dihedral(const Image& img, int op);

}  // namespace gdl
