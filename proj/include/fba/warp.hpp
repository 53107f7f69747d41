#pragma once

#include <cstdint>
#include <vector>

#include "fba/homography.hpp"
#include "fba/image.hpp"

namespace fba {

struct WarpResult {
    PlanarImage image;
    std::vector<std::uint8_t> valid;  // 1 where the source pixel existed
};

// Inverse-mapped bicubic resampling of `image` through `h` onto an
// out_width x out_height grid. Pixels whose preimage falls outside the source
// are zero and flagged invalid.
WarpResult warp_image(const PlanarImage& image, const Homography& h,
                      int out_width, int out_height);

struct RegistrationParams {
    double sigma_min = 1.8;
    double match_ratio = 0.8;
    double ransac_tolerance = 2.0;
    int ransac_iterations = 2000;
    std::uint64_t seed = 0;
    bool skip_unregistered = false;  // drop failing frames instead of throwing
};

struct Rect {
    int x = 0, y = 0, width = 0, height = 0;
};

struct BurstRegistration {
    std::vector<PlanarImage> frames;      // aligned to frame 0's grid
    std::vector<Homography> homographies; // frame -> reference mapping
    std::vector<std::uint8_t> mask;       // intersection of validity masks
    Rect crop;                            // largest rectangle inside the mask
    std::vector<int> kept;                // original indices of output frames
};

// Aligns every frame to the first via feature matches and a dominant
// homography. Frame 0 passes through unchanged. Registration failures carry
// the frame index; with skip_unregistered they drop the frame instead.
BurstRegistration register_burst(const std::vector<PlanarImage>& burst,
                                 const RegistrationParams& params = {});

// Largest axis-aligned rectangle of nonzero cells.
Rect largest_inside_rectangle(const std::vector<std::uint8_t>& mask, int width,
                              int height);

PlanarImage crop_image(const PlanarImage& img, const Rect& r);

}  // namespace fba
