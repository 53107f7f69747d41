#pragma once

#include "fba/image.hpp"

namespace fba {

// Unitary-convention 2D DFT of a real plane (scaling 1/sqrt(W*H)).
// Arbitrary sizes are supported directly; nothing is padded here.
Spectrum fft2(const Plane& plane, int width, int height);
Spectrum fft2_plane(const PlanarImage& img, int channel);

// Unitary inverse transform. The imaginary residue of the result is
// discarded; its maximum magnitude is reported through max_abs_imag when a
// sink is given.
Plane ifft2(const Spectrum& spectrum, double* max_abs_imag = nullptr);

// Raw per-bin magnitudes |spectrum|.
MagnitudeMap magnitude(const Spectrum& spectrum);

// In-place unitary transform on a caller-owned buffer; no allocations, so
// streaming consumers can hold their scratch across calls.
void fft2_inplace(std::vector<std::complex<double>>& buffer, int width,
                  int height, bool inverse);

// 1D unitary transforms used by the kernel simulator.
void fft1(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace fba
