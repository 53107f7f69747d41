#include "fba/gaussian.hpp"

namespace fba {

namespace {

std::vector<double> gaussian_taps(double sigma) {
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
        taps[i + radius] = w;
        sum += w;
    }
    for (double& w : taps) w /= sum;
    return taps;
}

inline int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// reflect-101: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
inline int mirror_index(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = wrap_index(i, period);
    return i < n ? i : period - i;
}

void convolve_axis(const std::vector<double>& taps, Boundary boundary,
                   const double* src, double* dst, int n, int stride) {
    const int radius = static_cast<int>(taps.size()) / 2;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = -radius; t <= radius; ++t) {
            const int j = boundary == Boundary::Periodic ? wrap_index(i + t, n)
                                                         : mirror_index(i + t, n);
            acc += taps[t + radius] * src[static_cast<std::size_t>(j) * stride];
        }
        dst[static_cast<std::size_t>(i) * stride] = acc;
    }
}

}  // namespace

void gaussian_blur_into(Plane& data, Plane& scratch, int width, int height,
                        double sigma, Boundary boundary) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: negative sigma");
    if (data.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("gaussian_blur: plane size mismatch");
    if (sigma == 0.0) return;

    const auto taps = gaussian_taps(sigma);
    scratch.resize(data.size());
    for (int y = 0; y < height; ++y)
        convolve_axis(taps, boundary, data.data() + static_cast<std::size_t>(y) * width,
                      scratch.data() + static_cast<std::size_t>(y) * width, width, 1);
    for (int x = 0; x < width; ++x)
        convolve_axis(taps, boundary, scratch.data() + x, data.data() + x, height,
                      width);
}

Plane gaussian_blur(const Plane& src, int width, int height, double sigma,
                    Boundary boundary) {
    Plane out = src;
    Plane scratch;
    gaussian_blur_into(out, scratch, width, height, sigma, boundary);
    return out;
}

MagnitudeMap gaussian_blur(const MagnitudeMap& map, double sigma) {
    MagnitudeMap out(map.width, map.height);
    out.values = gaussian_blur(map.values, map.width, map.height, sigma,
                               Boundary::Periodic);
    return out;
}

PlanarImage gaussian_blur(const PlanarImage& img, double sigma, Boundary boundary) {
    PlanarImage out(img.width, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c)
        out.planes[c] = gaussian_blur(img.planes[c], img.width, img.height, sigma,
                                      boundary);
    return out;
}

}  // namespace fba
