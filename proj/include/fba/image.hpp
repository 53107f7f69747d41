#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace fba {

using Plane = std::vector<double>;

// H x W x C image with per-channel row-major planes. Pixel values live in a
// nominal [0,1] range; intermediates may drift outside and are clamped only
// when quantized for file output.
struct PlanarImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<Plane> planes;

    PlanarImage() = default;
    PlanarImage(int w, int h, int c) : width(w), height(h), channels(c) {
        if (w < 1 || h < 1 || (c != 1 && c != 3))
            throw std::invalid_argument("PlanarImage: bad dimensions");
        planes.assign(c, Plane(static_cast<std::size_t>(w) * h, 0.0));
    }

    double& at(int c, int y, int x) {
        return planes[c][static_cast<std::size_t>(y) * width + x];
    }
    double at(int c, int y, int x) const {
        return planes[c][static_cast<std::size_t>(y) * width + x];
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }

    bool same_shape(const PlanarImage& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    bool is_finite() const {
        for (const auto& p : planes)
            for (double v : p)
                if (!std::isfinite(v)) return false;
        return true;
    }
};

// Complex 2D Fourier transform of one channel. Dimensions match the source
// image; the transform is unitary (1/sqrt(W*H) scaling on both directions),
// so fft2 followed by ifft2 is the identity and the DC bin of a real plane
// equals sum(plane) / sqrt(W*H).
struct Spectrum {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> bins;

    Spectrum() = default;
    Spectrum(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("Spectrum: bad dimensions");
        bins.assign(static_cast<std::size_t>(w) * h, {0.0, 0.0});
    }

    std::complex<double>& at(int y, int x) {
        return bins[static_cast<std::size_t>(y) * width + x];
    }
    std::complex<double> at(int y, int x) const {
        return bins[static_cast<std::size_t>(y) * width + x];
    }
};

// Nonnegative per-bin magnitudes paired with a Spectrum's frequency grid.
struct MagnitudeMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    MagnitudeMap() = default;
    MagnitudeMap(int w, int h) : width(w), height(h) {
        if (w < 1 || h < 1) throw std::invalid_argument("MagnitudeMap: bad dimensions");
        values.assign(static_cast<std::size_t>(w) * h, 0.0);
    }
};

// BT.601 luma of a color image; identity for grayscale.
Plane luma(const PlanarImage& img);

double rmse(const PlanarImage& a, const PlanarImage& b);
double max_abs_diff(const PlanarImage& a, const PlanarImage& b);

}  // namespace fba
