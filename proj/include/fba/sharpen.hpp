#pragma once

#include "fba/image.hpp"

namespace fba {

enum class Denoiser {
    None,
    NlMeans,       // 7x7 patches, 21x21 search window
    DctThreshold,  // 8x8 block DCT hard thresholding
};

struct SharpenConfig {
    double rho = 2.0;    // Gaussian sharpening sigma, valid [0.5, 5]
    double delta = 0.4;  // fraction of removed noise added back, [0, 1]
    Denoiser denoiser = Denoiser::NlMeans;
    double denoise_strength = 1.0;

    void validate() const;
};

// Noise level estimate from the 5-point Laplacian residual:
// median(|lap|) / 0.6745 / sqrt(20).
double estimate_noise_sigma(const PlanarImage& img);

// Runs the configured denoiser; Denoiser::None is the identity.
PlanarImage denoise(const PlanarImage& img, const SharpenConfig& config);

// d = denoise(u); s = 2d - G_rho(d); out = s + delta * (u - d).
// With Denoiser::None this is exactly 2u - G_rho(u).
PlanarImage noise_aware_sharpen(const PlanarImage& img, const SharpenConfig& config);

}  // namespace fba
