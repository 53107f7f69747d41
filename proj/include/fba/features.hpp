#pragma once

#include <vector>

#include "fba/image.hpp"

namespace fba {

// Scale-space blob feature with a 4x4x8 gradient-orientation descriptor.
struct Feature {
    double x = 0.0;       // subpixel position in source image coordinates
    double y = 0.0;
    double scale = 0.0;   // detection sigma in source image pixels
    double angle = 0.0;   // dominant gradient orientation, radians
    double response = 0.0;
    std::vector<float> descriptor;  // 128 entries, unit Euclidean length
};

struct DetectorParams {
    double min_scale = 1.8;        // features below are discarded
    double contrast_threshold = 0.02;
    double edge_ratio = 10.0;
    int scales_per_octave = 3;
    double base_sigma = 1.6;
    int max_features = 0;          // 0 = unlimited
};

// Difference-of-Gaussians pyramid detector. Color inputs are reduced to BT.601
// luma. Results are sorted by response, strongest first, and deterministic
// for identical inputs. Images smaller than 32x32 are rejected.
std::vector<Feature> detect_features(const PlanarImage& image,
                                     const DetectorParams& params = {});

std::vector<Feature> detect_features(const PlanarImage& image, double min_scale);

}  // namespace fba
