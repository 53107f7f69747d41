#include "fba/warp.hpp"

#include <algorithm>
#include <cmath>

#include "fba/features.hpp"

namespace fba {

namespace {

inline double cubic_weight(double t) {
    // Catmull-Rom
    const double a = std::abs(t);
    if (a < 1.0) return 1.5 * a * a * a - 2.5 * a * a + 1.0;
    if (a < 2.0) return -0.5 * a * a * a + 2.5 * a * a - 4.0 * a + 2.0;
    return 0.0;
}

double sample_bicubic(const Plane& p, int w, int h, double fx, double fy) {
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double dx = fx - x0;
    const double dy = fy - y0;
    double acc = 0.0;
    for (int j = -1; j <= 2; ++j) {
        const int yy = std::clamp(y0 + j, 0, h - 1);
        const double wy = cubic_weight(j - dy);
        double row = 0.0;
        for (int i = -1; i <= 2; ++i) {
            const int xx = std::clamp(x0 + i, 0, w - 1);
            row += cubic_weight(i - dx) * p[static_cast<std::size_t>(yy) * w + xx];
        }
        acc += wy * row;
    }
    return acc;
}

}  // namespace

WarpResult warp_image(const PlanarImage& image, const Homography& h,
                      int out_width, int out_height) {
    const Homography hinv = h.inverse();
    WarpResult out;
    out.image = PlanarImage(out_width, out_height, image.channels);
    out.valid.assign(static_cast<std::size_t>(out_width) * out_height, 0);

    // floating-point dust in an estimated homography must not mask border
    // pixels whose preimage sits exactly on the frame edge
    constexpr double kEdgeTol = 1e-6;
    for (int y = 0; y < out_height; ++y) {
        for (int x = 0; x < out_width; ++x) {
            const double w = hinv.m[6] * x + hinv.m[7] * y + hinv.m[8];
            if (std::abs(w) < 1e-12) continue;
            double sx = (hinv.m[0] * x + hinv.m[1] * y + hinv.m[2]) / w;
            double sy = (hinv.m[3] * x + hinv.m[4] * y + hinv.m[5]) / w;
            if (sx < -kEdgeTol || sy < -kEdgeTol || sx > image.width - 1 + kEdgeTol ||
                sy > image.height - 1 + kEdgeTol)
                continue;
            sx = std::clamp(sx, 0.0, static_cast<double>(image.width - 1));
            sy = std::clamp(sy, 0.0, static_cast<double>(image.height - 1));
            out.valid[static_cast<std::size_t>(y) * out_width + x] = 1;
            for (int c = 0; c < image.channels; ++c)
                out.image.at(c, y, x) = sample_bicubic(image.planes[c], image.width,
                                                       image.height, sx, sy);
        }
    }
    return out;
}

Rect largest_inside_rectangle(const std::vector<std::uint8_t>& mask, int width,
                              int height) {
    // classic histogram-stack scan over rows
    std::vector<int> column(width, 0);
    Rect best;
    long best_area = 0;
    std::vector<int> stack;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x)
            column[x] = mask[static_cast<std::size_t>(y) * width + x] ? column[x] + 1 : 0;
        stack.clear();
        for (int x = 0; x <= width; ++x) {
            const int cur = x < width ? column[x] : 0;
            while (!stack.empty() && column[stack.back()] >= cur) {
                const int hgt = column[stack.back()];
                stack.pop_back();
                const int left = stack.empty() ? 0 : stack.back() + 1;
                const long area = static_cast<long>(hgt) * (x - left);
                if (area > best_area && hgt > 0) {
                    best_area = area;
                    best = {left, y - hgt + 1, x - left, hgt};
                }
            }
            stack.push_back(x);
        }
    }
    return best;
}

PlanarImage crop_image(const PlanarImage& img, const Rect& r) {
    if (r.width < 1 || r.height < 1 || r.x < 0 || r.y < 0 ||
        r.x + r.width > img.width || r.y + r.height > img.height)
        throw std::invalid_argument("crop_image: rectangle out of bounds");
    PlanarImage out(r.width, r.height, img.channels);
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < r.height; ++y)
            for (int x = 0; x < r.width; ++x)
                out.at(c, y, x) = img.at(c, r.y + y, r.x + x);
    return out;
}

BurstRegistration register_burst(const std::vector<PlanarImage>& burst,
                                 const RegistrationParams& params) {
    if (burst.empty()) throw std::invalid_argument("register_burst: empty burst");
    for (const auto& f : burst)
        if (!f.same_shape(burst[0]))
            throw std::invalid_argument("register_burst: frame shape mismatch");

    BurstRegistration out;
    const int w = burst[0].width, h = burst[0].height;
    out.frames.push_back(burst[0]);
    out.homographies.push_back(Homography::identity());
    out.kept.push_back(0);
    out.mask.assign(static_cast<std::size_t>(w) * h, 1);

    if (burst.size() > 1) {
        DetectorParams det;
        det.min_scale = params.sigma_min;
        const auto ref_features = detect_features(burst[0], det);

        for (std::size_t i = 1; i < burst.size(); ++i) {
            try {
                const auto features = detect_features(burst[i], det);
                const auto matches =
                    match_features(features, ref_features, params.match_ratio);
                RansacParams rp;
                rp.inlier_tolerance = params.ransac_tolerance;
                rp.iterations = params.ransac_iterations;
                rp.seed = params.seed ^ (0x9e3779b97f4a7c15ULL * i);
                const auto est =
                    estimate_homography(matches, features, ref_features, rp);

                // est maps frame i into the reference; resample through it
                WarpResult warped = warp_image(burst[i], est.homography, w, h);
                for (std::size_t px = 0; px < out.mask.size(); ++px)
                    out.mask[px] &= warped.valid[px];
                out.frames.push_back(std::move(warped.image));
                out.homographies.push_back(est.homography);
                out.kept.push_back(static_cast<int>(i));
            } catch (const std::exception& e) {
                if (params.skip_unregistered) continue;
                throw RegistrationError("frame " + std::to_string(i) +
                                        " failed to register: " + e.what());
            }
        }
    }

    out.crop = largest_inside_rectangle(out.mask, w, h);
    return out;
}

}  // namespace fba
