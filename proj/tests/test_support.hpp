#pragma once

#include <string>
#include <vector>

#include "fba/image.hpp"
#include "fba/rng.hpp"

namespace fba::test {

inline Plane random_plane(int w, int h, std::uint64_t seed, double lo = 0.0,
                          double hi = 1.0) {
    Rng rng(seed, 0x706c616e, 0, 0);
    Plane p(static_cast<std::size_t>(w) * h);
    for (double& v : p) v = lo + (hi - lo) * rng.uniform();
    return p;
}

inline PlanarImage random_image(int w, int h, int c, std::uint64_t seed) {
    PlanarImage img(w, h, c);
    for (int ch = 0; ch < c; ++ch) img.planes[ch] = random_plane(w, h, seed + ch);
    return img;
}

inline PlanarImage constant_image(int w, int h, int c, double value) {
    PlanarImage img(w, h, c);
    for (auto& p : img.planes) std::fill(p.begin(), p.end(), value);
    return img;
}

inline PlanarImage checkerboard(int w, int h, int cell) {
    PlanarImage img(w, h, 1);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(0, y, x) = ((x / cell) + (y / cell)) % 2 ? 0.9 : 0.1;
    return img;
}

inline double plane_rmse(const Plane& a, const Plane& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / a.size());
}

inline double plane_max_diff(const Plane& a, const Plane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Scratch directory for I/O tests.
std::string temp_dir();

}  // namespace fba::test
