#include "fba/image.hpp"

namespace fba {

Plane luma(const PlanarImage& img) {
    if (img.channels == 1) return img.planes[0];
    Plane out(img.pixel_count());
    const Plane& r = img.planes[0];
    const Plane& g = img.planes[1];
    const Plane& b = img.planes[2];
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return out;
}

double rmse(const PlanarImage& a, const PlanarImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("rmse: shape mismatch");
    double acc = 0.0;
    std::size_t n = 0;
    for (int c = 0; c < a.channels; ++c) {
        for (std::size_t i = 0; i < a.planes[c].size(); ++i) {
            const double d = a.planes[c][i] - b.planes[c][i];
            acc += d * d;
            ++n;
        }
    }
    return std::sqrt(acc / static_cast<double>(n));
}

double max_abs_diff(const PlanarImage& a, const PlanarImage& b) {
    if (!a.same_shape(b)) throw std::invalid_argument("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (int c = 0; c < a.channels; ++c)
        for (std::size_t i = 0; i < a.planes[c].size(); ++i)
            m = std::max(m, std::abs(a.planes[c][i] - b.planes[c][i]));
    return m;
}

}  // namespace fba
