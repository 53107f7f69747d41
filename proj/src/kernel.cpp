#include "fba/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "fba/fft.hpp"

namespace fba {

BlurKernel::BlurKernel(int s) : size(s) {
    if (s < 1 || s % 2 == 0)
        throw std::invalid_argument("BlurKernel: size must be odd and positive");
    grid.assign(static_cast<std::size_t>(s) * s, 0.0);
}

double kernel_mass(const BlurKernel& k) {
    double m = 0.0;
    for (double v : k.grid) m += v;
    return m;
}

std::array<double, 2> kernel_first_moment(const BlurKernel& k) {
    const double m = kernel_mass(k);
    if (m <= 0.0) throw std::invalid_argument("kernel_first_moment: zero mass");
    const int c = k.center();
    double mx = 0.0, my = 0.0;
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x) {
            const double v = k.at(y, x);
            mx += v * (x - c);
            my += v * (y - c);
        }
    return {mx / m, my / m};
}

std::array<double, 3> kernel_second_moment(const BlurKernel& k) {
    const double m = kernel_mass(k);
    if (m <= 0.0) throw std::invalid_argument("kernel_second_moment: zero mass");
    const auto mu = kernel_first_moment(k);
    const int c = k.center();
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x) {
            const double v = k.at(y, x);
            const double dx = (x - c) - mu[0];
            const double dy = (y - c) - mu[1];
            sxx += v * dx * dx;
            sxy += v * dx * dy;
            syy += v * dy * dy;
        }
    return {sxx / m, sxy / m, syy / m};
}

void normalize_mass(BlurKernel& k) {
    const double m = kernel_mass(k);
    if (m <= 0.0) throw std::invalid_argument("normalize_mass: zero mass");
    for (double& v : k.grid) v /= m;
}

namespace {

// Tight bounding box of nonzero entries; returns false when empty.
bool nonzero_bounds(const BlurKernel& k, int& x0, int& x1, int& y0, int& y1) {
    x0 = y0 = k.size;
    x1 = y1 = -1;
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x)
            if (k.at(y, x) != 0.0) {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
    return x1 >= 0;
}

}  // namespace

BlurKernel shift_kernel(const BlurKernel& k, double dx, double dy) {
    if (kernel_mass(k) <= 0.0)
        throw std::invalid_argument("shift_kernel: zero mass");
    if (dx == 0.0 && dy == 0.0) return k;

    int x0, x1, y0, y1;
    nonzero_bounds(k, x0, x1, y0, y1);
    const int c = k.center();

    // target cell span relative to the center; the +1 neighbor is touched
    // only for fractional landings
    auto cell_span = [](double lo, double hi, int& cmin, int& cmax) {
        cmin = static_cast<int>(std::floor(lo));
        const double fhi = hi - std::floor(hi);
        cmax = static_cast<int>(std::floor(hi)) + (fhi > 0.0 ? 1 : 0);
    };
    int cx0, cx1, cy0, cy1;
    cell_span(x0 - c + dx, x1 - c + dx, cx0, cx1);
    cell_span(y0 - c + dy, y1 - c + dy, cy0, cy1);
    const int half = std::max({-cx0, cx1, -cy0, cy1});
    const int out_size = std::max(k.size, 2 * half + 1);

    BlurKernel out(out_size);
    const int oc = out.center();

    for (int y = 0; y < k.size; ++y) {
        for (int x = 0; x < k.size; ++x) {
            const double v = k.at(y, x);
            if (v == 0.0) continue;
            const double tx = (x - c) + dx + oc;
            const double ty = (y - c) + dy + oc;
            const int ix = static_cast<int>(std::floor(tx));
            const int iy = static_cast<int>(std::floor(ty));
            const double fx = tx - ix;
            const double fy = ty - iy;
            out.at(iy, ix) += v * (1 - fx) * (1 - fy);
            if (fx > 0.0) out.at(iy, ix + 1) += v * fx * (1 - fy);
            if (fy > 0.0) out.at(iy + 1, ix) += v * (1 - fx) * fy;
            if (fx > 0.0 && fy > 0.0) out.at(iy + 1, ix + 1) += v * fx * fy;
        }
    }
    return out;
}

BlurKernel center_kernel(const BlurKernel& k) {
    auto mu = kernel_first_moment(k);
    if (std::hypot(mu[0], mu[1]) < 1e-12) return k;
    BlurKernel out = shift_kernel(k, -mu[0], -mu[1]);
    // bilinear splatting preserves the first moment exactly, but guard anyway
    mu = kernel_first_moment(out);
    if (std::hypot(mu[0], mu[1]) > 0.05)
        out = shift_kernel(out, -mu[0], -mu[1]);
    return out;
}

BlurKernel embed_kernel(const BlurKernel& k, int size) {
    if (size % 2 == 0) throw std::invalid_argument("embed_kernel: size must be odd");
    BlurKernel out(size);
    const int shift = out.center() - k.center();
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x) {
            const double v = k.at(y, x);
            if (v == 0.0) continue;
            const int ox = x + shift;
            const int oy = y + shift;
            if (ox < 0 || oy < 0 || ox >= size || oy >= size)
                throw std::invalid_argument("embed_kernel: mass outside target grid");
            out.at(oy, ox) = v;
        }
    return out;
}

Plane embed_for_convolution(const BlurKernel& k, int width, int height) {
    Plane out(static_cast<std::size_t>(width) * height, 0.0);
    const int c = k.center();
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x) {
            const double v = k.at(y, x);
            if (v == 0.0) continue;
            const int ox = ((x - c) % width + width) % width;
            const int oy = ((y - c) % height + height) % height;
            out[static_cast<std::size_t>(oy) * width + ox] += v;
        }
    return out;
}

PlanarImage convolve_periodic(const PlanarImage& img, const BlurKernel& k) {
    const Plane kplane = embed_for_convolution(k, img.width, img.height);
    Spectrum khat = fft2(kplane, img.width, img.height);
    // the unitary forward transform carries a 1/sqrt(N) factor; plain
    // convolution needs the product scaled back by sqrt(N)
    const double scale = std::sqrt(static_cast<double>(img.pixel_count()));

    PlanarImage out(img.width, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        Spectrum s = fft2_plane(img, c);
        for (std::size_t i = 0; i < s.bins.size(); ++i)
            s.bins[i] *= khat.bins[i] * scale;
        out.planes[c] = ifft2(s);
    }
    return out;
}

}  // namespace fba
