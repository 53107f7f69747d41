#include "fba/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fba/gaussian.hpp"

namespace fba {

namespace {

struct Level {
    Plane data;
    int width = 0;
    int height = 0;

    double at(int y, int x) const {
        return data[static_cast<std::size_t>(y) * width + x];
    }
};

Level downsample(const Level& src) {
    Level out;
    out.width = src.width / 2;
    out.height = src.height / 2;
    out.data.resize(static_cast<std::size_t>(out.width) * out.height);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            out.data[static_cast<std::size_t>(y) * out.width + x] = src.at(2 * y, 2 * x);
    return out;
}

struct Candidate {
    int octave;
    int level;   // DoG level index
    double x, y; // refined, octave coordinates
    double sigma_octave;
    double response;
    double level_offset;
};

// 3x3 spatial Hessian edge rejection: trace^2/det < (r+1)^2/r.
bool passes_edge_test(const Level& dog, int y, int x, double edge_ratio) {
    const double dxx = dog.at(y, x + 1) + dog.at(y, x - 1) - 2.0 * dog.at(y, x);
    const double dyy = dog.at(y + 1, x) + dog.at(y - 1, x) - 2.0 * dog.at(y, x);
    const double dxy = 0.25 * (dog.at(y + 1, x + 1) - dog.at(y + 1, x - 1) -
                               dog.at(y - 1, x + 1) + dog.at(y - 1, x - 1));
    const double tr = dxx + dyy;
    const double det = dxx * dyy - dxy * dxy;
    if (det <= 0.0) return false;
    const double r = edge_ratio;
    return tr * tr / det < (r + 1.0) * (r + 1.0) / r;
}

// Quadratic refinement of an extremum across (x, y, level). Returns false if
// the fit diverges.
bool refine(const std::vector<Level>& dogs, int level, int& y, int& x,
            double out[4]) {
    const int w = dogs[level].width, h = dogs[level].height;
    double ox = 0, oy = 0, os = 0, value = 0;
    for (int iter = 0; iter < 5; ++iter) {
        const Level& d0 = dogs[level - 1];
        const Level& d1 = dogs[level];
        const Level& d2 = dogs[level + 1];

        const double gx = 0.5 * (d1.at(y, x + 1) - d1.at(y, x - 1));
        const double gy = 0.5 * (d1.at(y + 1, x) - d1.at(y - 1, x));
        const double gs = 0.5 * (d2.at(y, x) - d0.at(y, x));

        const double hxx = d1.at(y, x + 1) + d1.at(y, x - 1) - 2 * d1.at(y, x);
        const double hyy = d1.at(y + 1, x) + d1.at(y - 1, x) - 2 * d1.at(y, x);
        const double hss = d2.at(y, x) + d0.at(y, x) - 2 * d1.at(y, x);
        const double hxy = 0.25 * (d1.at(y + 1, x + 1) - d1.at(y + 1, x - 1) -
                                   d1.at(y - 1, x + 1) + d1.at(y - 1, x - 1));
        const double hxs = 0.25 * (d2.at(y, x + 1) - d2.at(y, x - 1) -
                                   d0.at(y, x + 1) + d0.at(y, x - 1));
        const double hys = 0.25 * (d2.at(y + 1, x) - d2.at(y - 1, x) -
                                   d0.at(y + 1, x) + d0.at(y - 1, x));

        // solve H * delta = -g with a 3x3 adjugate
        const double det = hxx * (hyy * hss - hys * hys) -
                           hxy * (hxy * hss - hys * hxs) +
                           hxs * (hxy * hys - hyy * hxs);
        if (std::abs(det) < 1e-20) return false;
        const double inv = 1.0 / det;
        ox = -inv * ((hyy * hss - hys * hys) * gx + (hxs * hys - hxy * hss) * gy +
                     (hxy * hys - hxs * hyy) * gs);
        oy = -inv * ((hys * hxs - hxy * hss) * gx + (hxx * hss - hxs * hxs) * gy +
                     (hxy * hxs - hxx * hys) * gs);
        os = -inv * ((hxy * hys - hyy * hxs) * gx + (hxy * hxs - hxx * hys) * gy +
                     (hxx * hyy - hxy * hxy) * gs);

        if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(os) < 0.5) {
            value = d1.at(y, x) + 0.5 * (gx * ox + gy * oy + gs * os);
            out[0] = x + ox;
            out[1] = y + oy;
            out[2] = os;
            out[3] = value;
            return true;
        }
        x += static_cast<int>(std::lround(std::clamp(ox, -1.0, 1.0)));
        y += static_cast<int>(std::lround(std::clamp(oy, -1.0, 1.0)));
        if (x < 1 || y < 1 || x >= w - 1 || y >= h - 1) return false;
    }
    return false;
}

// Gradient at a Gaussian level, central differences.
inline void gradient(const Level& g, int y, int x, double& mag, double& angle) {
    const double dx = 0.5 * (g.at(y, x + 1) - g.at(y, x - 1));
    const double dy = 0.5 * (g.at(y + 1, x) - g.at(y - 1, x));
    mag = std::hypot(dx, dy);
    angle = std::atan2(dy, dx);
}

std::vector<double> orientation_peaks(const Level& g, double x, double y,
                                      double sigma) {
    constexpr int kBins = 36;
    double hist[kBins] = {0};
    const double radius_f = 3.0 * 1.5 * sigma;
    const int radius = std::max(1, static_cast<int>(std::lround(radius_f)));
    const int ix = static_cast<int>(std::lround(x));
    const int iy = static_cast<int>(std::lround(y));
    const double denom = 2.0 * (1.5 * sigma) * (1.5 * sigma);

    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const int px = ix + dx, py = iy + dy;
            if (px < 1 || py < 1 || px >= g.width - 1 || py >= g.height - 1) continue;
            double mag, ang;
            gradient(g, py, px, mag, ang);
            const double wgt = std::exp(-(dx * dx + dy * dy) / denom);
            int bin = static_cast<int>(std::floor((ang + M_PI) / (2.0 * M_PI) * kBins));
            bin = std::clamp(bin, 0, kBins - 1);
            hist[bin] += wgt * mag;
        }
    }
    // a couple of circular smoothing passes
    for (int pass = 0; pass < 2; ++pass) {
        double prev = hist[kBins - 1];
        const double first = hist[0];
        for (int b = 0; b < kBins; ++b) {
            const double next = b + 1 < kBins ? hist[b + 1] : first;
            const double cur = hist[b];
            hist[b] = 0.25 * prev + 0.5 * cur + 0.25 * next;
            prev = cur;
        }
    }
    double peak = 0.0;
    for (double v : hist) peak = std::max(peak, v);
    if (peak <= 0.0) return {};

    std::vector<double> angles;
    for (int b = 0; b < kBins; ++b) {
        const double l = hist[(b + kBins - 1) % kBins];
        const double c = hist[b];
        const double r = hist[(b + 1) % kBins];
        if (c >= 0.8 * peak && c > l && c > r) {
            // parabolic interpolation of the bin center
            const double offset = 0.5 * (l - r) / (l - 2 * c + r);
            const double ang = (b + 0.5 + offset) / kBins * 2.0 * M_PI - M_PI;
            angles.push_back(ang);
            if (angles.size() == 2) break;
        }
    }
    return angles;
}

std::vector<float> build_descriptor(const Level& g, double x, double y,
                                    double sigma, double angle) {
    constexpr int kCells = 4;
    constexpr int kBins = 8;
    const double cell = 3.0 * sigma;
    const double window = cell * (kCells + 1) * 0.5 * std::sqrt(2.0);
    const int radius = std::min(static_cast<int>(std::lround(window)),
                                std::max(g.width, g.height));
    const double ca = std::cos(angle), sa = std::sin(angle);
    const int ix = static_cast<int>(std::lround(x));
    const int iy = static_cast<int>(std::lround(y));

    double hist[kCells][kCells][kBins] = {};
    const double sigma_w = 0.5 * kCells * cell;

    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            const int px = ix + dx, py = iy + dy;
            if (px < 1 || py < 1 || px >= g.width - 1 || py >= g.height - 1) continue;
            // rotate into the feature frame
            const double u = (ca * dx + sa * dy) / cell;
            const double v = (-sa * dx + ca * dy) / cell;
            const double cu = u + kCells / 2.0 - 0.5;
            const double cv = v + kCells / 2.0 - 0.5;
            if (cu <= -1.0 || cv <= -1.0 || cu >= kCells || cv >= kCells) continue;

            double mag, ang;
            gradient(g, py, px, mag, ang);
            ang -= angle;
            while (ang < 0) ang += 2.0 * M_PI;
            while (ang >= 2.0 * M_PI) ang -= 2.0 * M_PI;

            const double wgt =
                mag * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma_w * sigma_w));
            const double ob = ang / (2.0 * M_PI) * kBins;

            const int u0 = static_cast<int>(std::floor(cu));
            const int v0 = static_cast<int>(std::floor(cv));
            const int o0 = static_cast<int>(std::floor(ob));
            const double fu = cu - u0, fv = cv - v0, fo = ob - o0;

            for (int du = 0; du <= 1; ++du)
                for (int dv = 0; dv <= 1; ++dv)
                    for (int dob = 0; dob <= 1; ++dob) {
                        const int uu = u0 + du, vv = v0 + dv;
                        if (uu < 0 || vv < 0 || uu >= kCells || vv >= kCells) continue;
                        const int oo = (o0 + dob) % kBins;
                        const double wu = du ? fu : 1 - fu;
                        const double wv = dv ? fv : 1 - fv;
                        const double wo = dob ? fo : 1 - fo;
                        hist[vv][uu][oo] += wgt * wu * wv * wo;
                    }
        }
    }

    std::vector<float> desc;
    desc.reserve(kCells * kCells * kBins);
    for (int v = 0; v < kCells; ++v)
        for (int u = 0; u < kCells; ++u)
            for (int o = 0; o < kBins; ++o)
                desc.push_back(static_cast<float>(hist[v][u][o]));

    auto normalize = [&] {
        double norm = 0.0;
        for (float d : desc) norm += static_cast<double>(d) * d;
        norm = std::sqrt(norm);
        if (norm > 0.0)
            for (float& d : desc) d = static_cast<float>(d / norm);
    };
    normalize();
    for (float& d : desc) d = std::min(d, 0.2f);
    normalize();
    return desc;
}

}  // namespace

std::vector<Feature> detect_features(const PlanarImage& image,
                                     const DetectorParams& params) {
    if (image.width < 32 || image.height < 32)
        throw std::invalid_argument("detect_features: image smaller than 32x32");
    if (params.min_scale < 0.0)
        throw std::invalid_argument("detect_features: negative min_scale");

    const int S = params.scales_per_octave;
    const double sigma0 = params.base_sigma;
    const double k = std::pow(2.0, 1.0 / S);

    Level base;
    base.width = image.width;
    base.height = image.height;
    {
        // assume ~0.5 px of capture blur in the input
        const double boost = std::sqrt(std::max(sigma0 * sigma0 - 0.25, 0.01));
        base.data = gaussian_blur(luma(image), image.width, image.height, boost,
                                  Boundary::Mirror);
    }

    std::vector<Feature> features;
    int octave = 0;
    while (std::min(base.width, base.height) >= 16) {
        // Gaussian stack: S + 3 levels, sigma0 * k^i
        std::vector<Level> gauss(S + 3);
        gauss[0] = base;
        for (int i = 1; i < S + 3; ++i) {
            const double s_prev = sigma0 * std::pow(k, i - 1);
            const double s_cur = sigma0 * std::pow(k, i);
            const double inc = std::sqrt(s_cur * s_cur - s_prev * s_prev);
            gauss[i].width = base.width;
            gauss[i].height = base.height;
            gauss[i].data = gaussian_blur(gauss[i - 1].data, base.width, base.height,
                                          inc, Boundary::Mirror);
        }
        std::vector<Level> dogs(S + 2);
        for (int i = 0; i < S + 2; ++i) {
            dogs[i].width = base.width;
            dogs[i].height = base.height;
            dogs[i].data.resize(gauss[i].data.size());
            for (std::size_t j = 0; j < dogs[i].data.size(); ++j)
                dogs[i].data[j] = gauss[i + 1].data[j] - gauss[i].data[j];
        }

        const double pre_threshold = 0.8 * params.contrast_threshold;
        for (int lvl = 1; lvl <= S; ++lvl) {
            const Level& d = dogs[lvl];
            for (int y = 1; y < d.height - 1; ++y) {
                for (int x = 1; x < d.width - 1; ++x) {
                    const double v = d.at(y, x);
                    if (std::abs(v) < pre_threshold) continue;
                    bool is_max = true, is_min = true;
                    for (int dl = -1; dl <= 1 && (is_max || is_min); ++dl)
                        for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy)
                            for (int dx = -1; dx <= 1; ++dx) {
                                if (dl == 0 && dy == 0 && dx == 0) continue;
                                const double o = dogs[lvl + dl].at(y + dy, x + dx);
                                if (o >= v) is_max = false;
                                if (o <= v) is_min = false;
                                if (!is_max && !is_min) break;
                            }
                    if (!is_max && !is_min) continue;

                    int ry = y, rx = x;
                    double fit[4];
                    if (!refine(dogs, lvl, ry, rx, fit)) continue;
                    if (std::abs(fit[3]) < params.contrast_threshold) continue;
                    if (!passes_edge_test(dogs[lvl], ry, rx, params.edge_ratio))
                        continue;

                    const double level_f = lvl + fit[2];
                    const double sigma_oct = sigma0 * std::pow(2.0, level_f / S);
                    const double scale = sigma_oct * std::pow(2.0, octave);
                    if (scale < params.min_scale) continue;

                    const int glvl = std::clamp(static_cast<int>(std::lround(level_f)),
                                                0, S + 2);
                    const auto angles =
                        orientation_peaks(gauss[glvl], fit[0], fit[1], sigma_oct);
                    for (double ang : angles) {
                        Feature f;
                        f.x = fit[0] * std::pow(2.0, octave);
                        f.y = fit[1] * std::pow(2.0, octave);
                        f.scale = scale;
                        f.angle = ang;
                        f.response = std::abs(fit[3]);
                        f.descriptor =
                            build_descriptor(gauss[glvl], fit[0], fit[1], sigma_oct, ang);
                        features.push_back(std::move(f));
                    }
                }
            }
        }

        base = downsample(gauss[S]);
        ++octave;
    }

    std::stable_sort(features.begin(), features.end(),
                     [](const Feature& a, const Feature& b) {
                         if (a.response != b.response) return a.response > b.response;
                         if (a.y != b.y) return a.y < b.y;
                         return a.x < b.x;
                     });
    if (params.max_features > 0 &&
        static_cast<int>(features.size()) > params.max_features)
        features.resize(params.max_features);
    return features;
}

std::vector<Feature> detect_features(const PlanarImage& image, double min_scale) {
    DetectorParams params;
    params.min_scale = min_scale;
    return detect_features(image, params);
}

}  // namespace fba
