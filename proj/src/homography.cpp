#include "fba/homography.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "fba/rng.hpp"

namespace fba {

double Homography::det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography Homography::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-12)
        throw std::invalid_argument("Homography: singular matrix");
    Homography out;
    out.m[0] = (m[4] * m[8] - m[5] * m[7]) / d;
    out.m[1] = (m[2] * m[7] - m[1] * m[8]) / d;
    out.m[2] = (m[1] * m[5] - m[2] * m[4]) / d;
    out.m[3] = (m[5] * m[6] - m[3] * m[8]) / d;
    out.m[4] = (m[0] * m[8] - m[2] * m[6]) / d;
    out.m[5] = (m[2] * m[3] - m[0] * m[5]) / d;
    out.m[6] = (m[3] * m[7] - m[4] * m[6]) / d;
    out.m[7] = (m[1] * m[6] - m[0] * m[7]) / d;
    out.m[8] = (m[0] * m[4] - m[1] * m[3]) / d;
    return out.normalized();
}

Homography Homography::normalized() const {
    Homography out = *this;
    if (out.m[8] != 0.0)
        for (double& v : out.m) v /= (*this).m[8];
    return out;
}

Homography compose(const Homography& a, const Homography& b) {
    Homography out;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a.m[r * 3 + k] * b.m[k * 3 + c];
            out.m[r * 3 + c] = s;
        }
    return out.normalized();
}

namespace {

struct Normalizer {
    double cx = 0, cy = 0, scale = 1;

    static Normalizer fit(const std::vector<std::array<double, 2>>& pts) {
        Normalizer n;
        for (const auto& p : pts) {
            n.cx += p[0];
            n.cy += p[1];
        }
        n.cx /= pts.size();
        n.cy /= pts.size();
        double dist = 0.0;
        for (const auto& p : pts) dist += std::hypot(p[0] - n.cx, p[1] - n.cy);
        dist /= pts.size();
        n.scale = dist > 1e-12 ? std::sqrt(2.0) / dist : 1.0;
        return n;
    }

    std::array<double, 2> apply(const std::array<double, 2>& p) const {
        return {(p[0] - cx) * scale, (p[1] - cy) * scale};
    }
    // as a 3x3 matrix
    Homography matrix() const {
        Homography h;
        h.m = {scale, 0, -scale * cx, 0, scale, -scale * cy, 0, 0, 1};
        return h;
    }
};

}  // namespace

Homography fit_homography(const std::vector<std::array<double, 2>>& from,
                          const std::vector<std::array<double, 2>>& to) {
    if (from.size() != to.size() || from.size() < 4)
        throw std::invalid_argument("fit_homography: need >= 4 point pairs");

    const Normalizer nf = Normalizer::fit(from);
    const Normalizer nt = Normalizer::fit(to);

    const int n = static_cast<int>(from.size());
    Eigen::MatrixXd a(2 * n, 9);
    for (int i = 0; i < n; ++i) {
        const auto p = nf.apply(from[i]);
        const auto q = nt.apply(to[i]);
        a.row(2 * i) << p[0], p[1], 1, 0, 0, 0, -q[0] * p[0], -q[0] * p[1], -q[0];
        a.row(2 * i + 1) << 0, 0, 0, p[0], p[1], 1, -q[1] * p[0], -q[1] * p[1], -q[1];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);

    Homography hn;
    for (int i = 0; i < 9; ++i) hn.m[i] = h[i];

    // denormalize: H = T_to^-1 * Hn * T_from
    const Homography result =
        compose(nt.matrix().inverse(), compose(hn, nf.matrix()));
    if (std::abs(result.det()) < 1e-12)
        throw RegistrationError("fit_homography: degenerate configuration");
    return result.normalized();
}

namespace {

double symmetric_transfer_error(const Homography& h, const Homography& hinv,
                                const std::array<double, 2>& p,
                                const std::array<double, 2>& q) {
    const auto fwd = h.apply(p[0], p[1]);
    const auto bwd = hinv.apply(q[0], q[1]);
    const double d1 = (fwd[0] - q[0]) * (fwd[0] - q[0]) +
                      (fwd[1] - q[1]) * (fwd[1] - q[1]);
    const double d2 = (bwd[0] - p[0]) * (bwd[0] - p[0]) +
                      (bwd[1] - p[1]) * (bwd[1] - p[1]);
    return std::sqrt(0.5 * (d1 + d2));
}

bool sample_degenerate(const std::vector<std::array<double, 2>>& pts) {
    // any three of the four collinear
    for (int skip = 0; skip < 4; ++skip) {
        std::array<std::array<double, 2>, 3> t;
        int n = 0;
        for (int i = 0; i < 4; ++i)
            if (i != skip) t[n++] = pts[i];
        const double area = (t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) -
                            (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]);
        if (std::abs(area) < 1e-9) return true;
    }
    return false;
}

}  // namespace

RansacResult estimate_homography_points(
    const std::vector<std::array<double, 2>>& from,
    const std::vector<std::array<double, 2>>& to, const RansacParams& params) {
    const int n = static_cast<int>(from.size());
    if (n < 4 || to.size() != from.size())
        throw RegistrationError("estimate_homography: fewer than 4 matches");

    Rng rng(params.seed, 0x72616e73, 0, 0);
    int best_count = -1;
    std::vector<bool> best_mask(n, false);

    std::vector<std::array<double, 2>> sf(4), st(4);
    for (int iter = 0; iter < params.iterations; ++iter) {
        int idx[4];
        idx[0] = static_cast<int>(rng.uniform_index(n));
        for (int k = 1; k < 4; ++k) {
            bool fresh;
            do {
                idx[k] = static_cast<int>(rng.uniform_index(n));
                fresh = true;
                for (int j = 0; j < k; ++j) fresh = fresh && idx[j] != idx[k];
            } while (!fresh);
        }
        for (int k = 0; k < 4; ++k) {
            sf[k] = from[idx[k]];
            st[k] = to[idx[k]];
        }
        if (sample_degenerate(sf) || sample_degenerate(st)) continue;

        Homography h;
        try {
            h = fit_homography(sf, st);
        } catch (const std::exception&) {
            continue;
        }
        Homography hinv;
        try {
            hinv = h.inverse();
        } catch (const std::exception&) {
            continue;
        }

        int count = 0;
        std::vector<bool> mask(n, false);
        for (int i = 0; i < n; ++i) {
            if (symmetric_transfer_error(h, hinv, from[i], to[i]) <=
                params.inlier_tolerance) {
                mask[i] = true;
                ++count;
            }
        }
        if (count > best_count) {
            best_count = count;
            best_mask = std::move(mask);
        }
    }

    if (best_count < 4 ||
        static_cast<double>(best_count) < params.min_inlier_ratio * n)
        throw RegistrationError("estimate_homography: inlier ratio below threshold");

    // refit on the consensus set, re-evaluate membership, refit once more
    RansacResult result;
    for (int round = 0; round < 2; ++round) {
        std::vector<std::array<double, 2>> in_from, in_to;
        for (int i = 0; i < n; ++i)
            if (best_mask[i]) {
                in_from.push_back(from[i]);
                in_to.push_back(to[i]);
            }
        result.homography = fit_homography(in_from, in_to);
        const Homography hinv = result.homography.inverse();
        int count = 0;
        std::vector<bool> mask(n, false);
        for (int i = 0; i < n; ++i) {
            if (symmetric_transfer_error(result.homography, hinv, from[i], to[i]) <=
                params.inlier_tolerance) {
                mask[i] = true;
                ++count;
            }
        }
        if (count < 4) break;  // keep the previous fit
        best_mask = std::move(mask);
        best_count = count;
    }
    result.inliers = best_mask;
    result.inlier_count = best_count;
    return result;
}

RansacResult estimate_homography(const MatchSet& matches,
                                 const std::vector<Feature>& source,
                                 const std::vector<Feature>& reference,
                                 const RansacParams& params) {
    std::vector<std::array<double, 2>> from, to;
    from.reserve(matches.size());
    to.reserve(matches.size());
    for (const auto& m : matches) {
        from.push_back({source[m.source].x, source[m.source].y});
        to.push_back({reference[m.target].x, reference[m.target].y});
    }
    return estimate_homography_points(from, to, params);
}

}  // namespace fba
