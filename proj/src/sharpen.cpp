#include "fba/sharpen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fba/gaussian.hpp"

namespace fba {

void SharpenConfig::validate() const {
    if (rho < 0.5 || rho > 5.0)
        throw std::invalid_argument("SharpenConfig: rho must be in [0.5, 5]");
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("SharpenConfig: delta must be in [0, 1]");
    if (denoise_strength <= 0.0)
        throw std::invalid_argument("SharpenConfig: denoise_strength must be positive");
}

namespace {

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

double plane_noise_sigma(const Plane& p, int w, int h) {
    std::vector<double> lap;
    lap.reserve(static_cast<std::size_t>(std::max(0, (w - 2) * (h - 2))));
    for (int y = 1; y + 1 < h; ++y)
        for (int x = 1; x + 1 < w; ++x) {
            const double v = p[static_cast<std::size_t>(y) * w + x];
            const double l = p[static_cast<std::size_t>(y) * w + x - 1] +
                             p[static_cast<std::size_t>(y) * w + x + 1] +
                             p[static_cast<std::size_t>(y - 1) * w + x] +
                             p[static_cast<std::size_t>(y + 1) * w + x] - 4.0 * v;
            lap.push_back(std::abs(l));
        }
    if (lap.empty()) return 0.0;
    auto mid = lap.begin() + lap.size() / 2;
    std::nth_element(lap.begin(), mid, lap.end());
    return *mid / 0.6745 / std::sqrt(20.0);
}

Plane nl_means_plane(const Plane& src, int w, int h, double sigma, double strength) {
    constexpr int kPatch = 3;   // 7x7 patches
    constexpr int kWindow = 10; // 21x21 search
    const double h2 = std::pow(0.6 * sigma * strength, 2.0);
    const double sigma2 = sigma * sigma;
    const int patch_n = (2 * kPatch + 1) * (2 * kPatch + 1);

    Plane out(src.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double wsum = 0.0, acc = 0.0, wmax = 0.0;
            for (int dy = -kWindow; dy <= kWindow; ++dy) {
                for (int dx = -kWindow; dx <= kWindow; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const int cy = y + dy, cx = x + dx;
                    if (cy < 0 || cy >= h || cx < 0 || cx >= w) continue;
                    double dist = 0.0;
                    for (int py = -kPatch; py <= kPatch; ++py)
                        for (int px = -kPatch; px <= kPatch; ++px) {
                            const int ay = mirror(y + py, h), ax = mirror(x + px, w);
                            const int by = mirror(cy + py, h), bx = mirror(cx + px, w);
                            const double d =
                                src[static_cast<std::size_t>(ay) * w + ax] -
                                src[static_cast<std::size_t>(by) * w + bx];
                            dist += d * d;
                        }
                    dist /= patch_n;
                    const double wgt =
                        h2 > 0.0
                            ? std::exp(-std::max(dist - 2.0 * sigma2, 0.0) / h2)
                            : (dist <= 2.0 * sigma2 ? 1.0 : 0.0);
                    wmax = std::max(wmax, wgt);
                    wsum += wgt;
                    acc += wgt * src[static_cast<std::size_t>(cy) * w + cx];
                }
            }
            // the reference pixel weighs as much as its best neighbor
            const double self = std::max(wmax, 1e-8);
            acc += self * src[static_cast<std::size_t>(y) * w + x];
            wsum += self;
            out[static_cast<std::size_t>(y) * w + x] = acc / wsum;
        }
    }
    return out;
}

struct Dct8 {
    double basis[8][8];
    Dct8() {
        for (int k = 0; k < 8; ++k) {
            const double a = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
            for (int i = 0; i < 8; ++i)
                basis[k][i] = a * std::cos((2 * i + 1) * k * M_PI / 16.0);
        }
    }
};

Plane dct_denoise_plane(const Plane& src, int w, int h, double sigma,
                        double strength) {
    static const Dct8 dct;
    const double thresh = 3.0 * sigma * strength;
    const int step = 2;

    Plane acc(src.size(), 0.0);
    Plane wsum(src.size(), 0.0);
    double block[8][8], tmp[8][8], coef[8][8];

    auto fetch = [&](int y, int x) {
        return src[static_cast<std::size_t>(mirror(y, h)) * w + mirror(x, w)];
    };

    for (int by = 0; by < h; by += step) {
        const int y0 = std::min(by, std::max(0, h - 8));
        for (int bx = 0; bx < w; bx += step) {
            const int x0 = std::min(bx, std::max(0, w - 8));
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) block[y][x] = fetch(y0 + y, x0 + x);
            // forward DCT, rows then columns
            for (int y = 0; y < 8; ++y)
                for (int k = 0; k < 8; ++k) {
                    double s = 0.0;
                    for (int x = 0; x < 8; ++x) s += block[y][x] * dct.basis[k][x];
                    tmp[y][k] = s;
                }
            for (int k = 0; k < 8; ++k)
                for (int j = 0; j < 8; ++j) {
                    double s = 0.0;
                    for (int y = 0; y < 8; ++y) s += tmp[y][j] * dct.basis[k][y];
                    coef[k][j] = s;
                }
            for (int ky = 0; ky < 8; ++ky)
                for (int kx = 0; kx < 8; ++kx)
                    if (!(ky == 0 && kx == 0) && std::abs(coef[ky][kx]) < thresh)
                        coef[ky][kx] = 0.0;
            // inverse
            for (int ky = 0; ky < 8; ++ky)
                for (int x = 0; x < 8; ++x) {
                    double s = 0.0;
                    for (int kx = 0; kx < 8; ++kx) s += coef[ky][kx] * dct.basis[kx][x];
                    tmp[ky][x] = s;
                }
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    double s = 0.0;
                    for (int ky = 0; ky < 8; ++ky) s += tmp[ky][x] * dct.basis[ky][y];
                    block[y][x] = s;
                }
            for (int y = 0; y < 8; ++y) {
                if (y0 + y >= h) break;
                for (int x = 0; x < 8; ++x) {
                    if (x0 + x >= w) break;
                    const std::size_t idx = static_cast<std::size_t>(y0 + y) * w + x0 + x;
                    acc[idx] += block[y][x];
                    wsum[idx] += 1.0;
                }
            }
            if (x0 == w - 8 && bx + step < w) break;
        }
        if (y0 == h - 8 && by + step < h) break;
    }
    Plane out(src.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = wsum[i] > 0.0 ? acc[i] / wsum[i] : src[i];
    return out;
}

}  // namespace

double estimate_noise_sigma(const PlanarImage& img) {
    double acc = 0.0;
    for (int c = 0; c < img.channels; ++c)
        acc += plane_noise_sigma(img.planes[c], img.width, img.height);
    return acc / img.channels;
}

PlanarImage denoise(const PlanarImage& img, const SharpenConfig& config) {
    config.validate();
    if (config.denoiser == Denoiser::None) return img;

    const double sigma = estimate_noise_sigma(img);
    if (sigma <= 0.0) return img;

    PlanarImage out(img.width, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        if (config.denoiser == Denoiser::NlMeans)
            out.planes[c] = nl_means_plane(img.planes[c], img.width, img.height,
                                           sigma, config.denoise_strength);
        else
            out.planes[c] = dct_denoise_plane(img.planes[c], img.width, img.height,
                                              sigma, config.denoise_strength);
    }
    return out;
}

PlanarImage noise_aware_sharpen(const PlanarImage& img, const SharpenConfig& config) {
    config.validate();
    const PlanarImage d = denoise(img, config);
    const PlanarImage blurred = gaussian_blur(d, config.rho, Boundary::Mirror);

    PlanarImage out(img.width, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c)
        for (std::size_t i = 0; i < out.planes[c].size(); ++i) {
            const double sharp = 2.0 * d.planes[c][i] - blurred.planes[c][i];
            out.planes[c][i] =
                sharp + config.delta * (img.planes[c][i] - d.planes[c][i]);
        }
    return out;
}

}  // namespace fba
