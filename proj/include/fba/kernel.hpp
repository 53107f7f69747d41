#pragma once

#include <array>
#include <vector>

#include "fba/image.hpp"

namespace fba {

// Nonnegative blur kernel on an odd square grid. Coordinates for the moment
// computations are taken relative to the grid center (size/2, size/2).
struct BlurKernel {
    int size = 41;
    std::vector<double> grid;  // row-major, size*size

    BlurKernel() : grid(static_cast<std::size_t>(41) * 41, 0.0) {}
    explicit BlurKernel(int s);

    double& at(int y, int x) { return grid[static_cast<std::size_t>(y) * size + x]; }
    double at(int y, int x) const {
        return grid[static_cast<std::size_t>(y) * size + x];
    }
    int center() const { return size / 2; }
};

double kernel_mass(const BlurKernel& k);

// First moment (mu_x, mu_y) relative to the grid center.
std::array<double, 2> kernel_first_moment(const BlurKernel& k);

// Central second moment (s_xx, s_xy, s_yy).
std::array<double, 3> kernel_second_moment(const BlurKernel& k);

// Scales entries so mass becomes exactly 1. Zero mass is an error.
void normalize_mass(BlurKernel& k);

// Subpixel translation by (dx, dy) with bilinear mass splatting. The grid
// grows (stays odd, same center pixel semantics) whenever mass would
// otherwise be pushed off the edge; mass is never truncated.
BlurKernel shift_kernel(const BlurKernel& k, double dx, double dy);

// Translates the kernel so its first moment vanishes (|mu| <= 0.05 px).
BlurKernel center_kernel(const BlurKernel& k);

// Re-embeds on a larger odd grid, centered. Shrinking is allowed only when
// all mass fits.
BlurKernel embed_kernel(const BlurKernel& k, int size);

// Kernel pasted into a width x height plane with its grid center at (0, 0),
// wrapping periodically. Convolving with this layout keeps a centered kernel
// from shifting the image.
Plane embed_for_convolution(const BlurKernel& k, int width, int height);

// Periodic convolution image * kernel via the FFT.
PlanarImage convolve_periodic(const PlanarImage& img, const BlurKernel& k);

}  // namespace fba
