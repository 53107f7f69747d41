#pragma once

#include "fba/image.hpp"

namespace fba {

enum class Boundary {
    Periodic,  // frequency grids wrap
    Mirror,    // spatial planes reflect (reflect-101)
};

// Separable Gaussian convolution, kernel truncated at radius ceil(4*sigma).
// sigma == 0 returns the input unchanged; negative sigma is an error.
Plane gaussian_blur(const Plane& src, int width, int height, double sigma,
                    Boundary boundary);

// In-place variant for streaming callers: `data` is filtered using `scratch`
// (grown on demand, otherwise untouched between calls).
void gaussian_blur_into(Plane& data, Plane& scratch, int width, int height,
                        double sigma, Boundary boundary);

MagnitudeMap gaussian_blur(const MagnitudeMap& map, double sigma);

PlanarImage gaussian_blur(const PlanarImage& img, double sigma,
                          Boundary boundary = Boundary::Mirror);

}  // namespace fba
