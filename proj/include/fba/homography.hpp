#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "fba/matching.hpp"

namespace fba {

struct RegistrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 3x3 projective map, normalized so m[8] == 1 whenever it is nonzero.
struct Homography {
    std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    static Homography identity() { return {}; }
    static Homography translation(double dx, double dy) {
        Homography h;
        h.m = {1, 0, dx, 0, 1, dy, 0, 0, 1};
        return h;
    }

    std::array<double, 2> apply(double x, double y) const {
        const double w = m[6] * x + m[7] * y + m[8];
        return {(m[0] * x + m[1] * y + m[2]) / w,
                (m[3] * x + m[4] * y + m[5]) / w};
    }

    Homography inverse() const;
    Homography normalized() const;
    double det() const;
};

Homography compose(const Homography& a, const Homography& b);  // a after b

// Least-squares homography from point correspondences (normalized DLT).
// Needs at least 4 pairs in general position.
Homography fit_homography(const std::vector<std::array<double, 2>>& from,
                          const std::vector<std::array<double, 2>>& to);

struct RansacParams {
    double inlier_tolerance = 2.0;  // px, symmetric transfer error
    int iterations = 2000;
    double min_inlier_ratio = 0.3;
    std::uint64_t seed = 0;
};

struct RansacResult {
    Homography homography;
    std::vector<bool> inliers;
    int inlier_count = 0;
};

// Seeded RANSAC over 4-point samples with a final least-squares refit on the
// inliers. Fewer than 4 matches or a best inlier ratio below the threshold
// raises RegistrationError.
RansacResult estimate_homography(const MatchSet& matches,
                                 const std::vector<Feature>& source,
                                 const std::vector<Feature>& reference,
                                 const RansacParams& params = {});

// Point-pair variant used by the synthetic oracles.
RansacResult estimate_homography_points(
    const std::vector<std::array<double, 2>>& from,
    const std::vector<std::array<double, 2>>& to, const RansacParams& params = {});

}  // namespace fba
