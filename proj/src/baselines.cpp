#include "fba/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fba/fft.hpp"

namespace fba {

namespace {

void require_same_shape(const std::vector<PlanarImage>& frames, const char* who) {
    if (frames.empty()) throw std::invalid_argument(std::string(who) + ": empty burst");
    for (const auto& f : frames)
        if (!f.same_shape(frames[0]))
            throw std::invalid_argument(std::string(who) + ": frame shape mismatch");
}

inline int mirror(int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i = ((i % period) + period) % period;
    return i < n ? i : period - i;
}

// 5-point Laplacian with mirrored borders.
Plane laplacian(const Plane& p, int w, int h) {
    Plane out(p.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double v = p[static_cast<std::size_t>(y) * w + x];
            out[static_cast<std::size_t>(y) * w + x] =
                p[static_cast<std::size_t>(y) * w + mirror(x - 1, w)] +
                p[static_cast<std::size_t>(y) * w + mirror(x + 1, w)] +
                p[static_cast<std::size_t>(mirror(y - 1, h)) * w + x] +
                p[static_cast<std::size_t>(mirror(y + 1, h)) * w + x] - 4.0 * v;
        }
    return out;
}

// Moving box sum over a block x block window with mirrored borders; the
// window spans offsets [-block/2, block/2) around each pixel.
Plane box_sum(const Plane& p, int w, int h, int block) {
    const int lo = -block / 2;
    const int hi = block - block / 2 - 1;
    Plane rows(p.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0;
            for (int t = lo; t <= hi; ++t)
                s += p[static_cast<std::size_t>(y) * w + mirror(x + t, w)];
            rows[static_cast<std::size_t>(y) * w + x] = s;
        }
    Plane out(p.size(), 0.0);
    for (int x = 0; x < w; ++x)
        for (int y = 0; y < h; ++y) {
            double s = 0.0;
            for (int t = lo; t <= hi; ++t)
                s += rows[static_cast<std::size_t>(mirror(y + t, h)) * w + x];
            out[static_cast<std::size_t>(y) * w + x] = s;
        }
    return out;
}

}  // namespace

PlanarImage align_and_average(const std::vector<PlanarImage>& frames) {
    require_same_shape(frames, "align_and_average");
    PlanarImage out(frames[0].width, frames[0].height, frames[0].channels);
    for (const auto& f : frames)
        for (int c = 0; c < out.channels; ++c)
            for (std::size_t i = 0; i < out.planes[c].size(); ++i)
                out.planes[c][i] += f.planes[c][i];
    const double inv = 1.0 / static_cast<double>(frames.size());
    for (auto& plane : out.planes)
        for (double& v : plane) v *= inv;
    return out;
}

DirichletEnergy dirichlet_energy(const PlanarImage& frame, int block) {
    if (block < 1) throw std::invalid_argument("dirichlet_energy: bad block size");
    const int w = frame.width, h = frame.height;
    const Plane gray = luma(frame);

    Plane energy(gray.size(), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double gx = 0.5 * (gray[static_cast<std::size_t>(y) * w + mirror(x + 1, w)] -
                                     gray[static_cast<std::size_t>(y) * w + mirror(x - 1, w)]);
            const double gy = 0.5 * (gray[static_cast<std::size_t>(mirror(y + 1, h)) * w + x] -
                                     gray[static_cast<std::size_t>(mirror(y - 1, h)) * w + x]);
            energy[static_cast<std::size_t>(y) * w + x] = gx * gx + gy * gy;
        }

    DirichletEnergy out;
    out.total = std::accumulate(energy.begin(), energy.end(), 0.0);
    out.map = box_sum(energy, w, h, block);
    return out;
}

PlanarImage lucky_frame_average(const std::vector<PlanarImage>& frames, int top_k,
                                int block) {
    require_same_shape(frames, "lucky_frame_average");
    const int count = static_cast<int>(frames.size());
    if (top_k < 1 || top_k > count)
        throw std::invalid_argument("lucky_frame_average: top_k out of range");

    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> totals(count);
    for (int i = 0; i < count; ++i) totals[i] = dirichlet_energy(frames[i], block).total;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return totals[a] > totals[b]; });

    std::vector<PlanarImage> selected;
    selected.reserve(top_k);
    for (int i = 0; i < top_k; ++i) selected.push_back(frames[order[i]]);
    return align_and_average(selected);
}

PlanarImage sharpness_selectivity_average(const std::vector<PlanarImage>& frames,
                                          double lambda) {
    require_same_shape(frames, "sharpness_selectivity_average");
    if (lambda <= 0.0)
        throw std::invalid_argument("sharpness_selectivity_average: lambda must be > 0");
    const int w = frames[0].width, h = frames[0].height, ch = frames[0].channels;
    const std::size_t n = frames[0].pixel_count();
    const std::size_t count = frames.size();

    // normalized |Laplacian| per frame, on luma
    std::vector<Plane> tex(count);
    for (std::size_t f = 0; f < count; ++f) {
        Plane lap = laplacian(luma(frames[f]), w, h);
        double peak = 0.0;
        for (double& v : lap) {
            v = std::abs(v);
            peak = std::max(peak, v);
        }
        if (peak > 0.0)
            for (double& v : lap) v /= peak;
        else
            std::fill(lap.begin(), lap.end(), 0.0);
        tex[f] = std::move(lap);
    }

    const PlanarImage mean = align_and_average(frames);
    Plane gamma = laplacian(luma(mean), w, h);
    double peak = 0.0;
    for (double& v : gamma) {
        v = std::abs(v);
        peak = std::max(peak, v);
    }
    if (peak > 0.0)
        for (double& v : gamma) v *= lambda / peak;
    else
        std::fill(gamma.begin(), gamma.end(), 0.0);

    PlanarImage out(w, h, ch);
    for (std::size_t i = 0; i < n; ++i) {
        double wsum = 0.0;
        std::array<double, 3> acc = {0.0, 0.0, 0.0};
        for (std::size_t f = 0; f < count; ++f) {
            const double wgt = std::pow(tex[f][i], gamma[i]);  // 0^0 == 1
            wsum += wgt;
            for (int c = 0; c < ch; ++c) acc[c] += wgt * frames[f].planes[c][i];
        }
        if (wsum > 0.0) {
            for (int c = 0; c < ch; ++c) out.planes[c][i] = acc[c] / wsum;
        } else {
            for (int c = 0; c < ch; ++c) out.planes[c][i] = mean.planes[c][i];
        }
    }
    return out;
}

PlanarImage frequency_percentile_fusion(const std::vector<PlanarImage>& frames,
                                        double top_fraction) {
    require_same_shape(frames, "frequency_percentile_fusion");
    if (top_fraction <= 0.0 || top_fraction > 1.0)
        throw std::invalid_argument("frequency_percentile_fusion: fraction in (0,1]");
    const int w = frames[0].width, h = frames[0].height, ch = frames[0].channels;
    const std::size_t count = frames.size();
    const int n_sel = std::max(
        1, static_cast<int>(std::lround(top_fraction * static_cast<double>(count))));

    PlanarImage out(w, h, ch);
    std::vector<Spectrum> spectra(count);
    std::vector<int> order(count);
    for (int c = 0; c < ch; ++c) {
        for (std::size_t f = 0; f < count; ++f) spectra[f] = fft2_plane(frames[f], c);
        Spectrum merged(w, h);
        for (std::size_t b = 0; b < merged.bins.size(); ++b) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int bb) {
                return std::abs(spectra[a].bins[b]) > std::abs(spectra[bb].bins[b]);
            });
            std::complex<double> acc{0.0, 0.0};
            for (int i = 0; i < n_sel; ++i) acc += spectra[order[i]].bins[b];
            merged.bins[b] = acc / static_cast<double>(n_sel);
        }
        out.planes[c] = ifft2(merged);
    }
    return out;
}

}  // namespace fba
