#include "fba/shake.hpp"

#include <cmath>
#include <stdexcept>

#include "fba/fft.hpp"
#include "fba/gaussian.hpp"

namespace fba {

void TremorParams::validate() const {
    if (t_exp <= 0.0 || t_exp > 1.0)
        throw std::invalid_argument("TremorParams: t_exp must be in (0, 1]");
    if (band_lo_hz <= 0.0 || band_lo_hz >= band_hi_hz)
        throw std::invalid_argument("TremorParams: band_lo must be below band_hi");
    if (sample_rate_hz <= 2.0 * band_hi_hz)
        throw std::invalid_argument("TremorParams: sample rate too low for the band");
    if (amplitude_px <= 0.0)
        throw std::invalid_argument("TremorParams: amplitude must be positive");
    if (axis_ratio < 1.0)
        throw std::invalid_argument("TremorParams: axis_ratio must be >= 1");
    if (grid < 3 || grid % 2 == 0)
        throw std::invalid_argument("TremorParams: grid must be odd and >= 3");
}

namespace {

// |H(f)|: flat inside [lo, hi], Butterworth-style 4th-order rolloff outside.
double band_gain(double f, double lo, double hi) {
    if (f <= 0.0) return 0.0;
    const double hp = 1.0 / std::sqrt(1.0 + std::pow(lo / f, 8.0));
    const double lp = 1.0 / std::sqrt(1.0 + std::pow(f / hi, 8.0));
    return hp * lp;
}

// One axis of the displacement process, sampled at params.sample_rate_hz for
// at least `duration` seconds. White noise is shaped in the frequency domain
// and normalized analytically so the process RMS equals amplitude_px.
std::vector<double> tremor_axis(const TremorParams& params, double duration,
                                Rng& rng) {
    const double rate = params.sample_rate_hz;
    std::size_t len = 256;
    const double min_seconds = std::max(duration, 1.0);
    while (len < static_cast<std::size_t>(min_seconds * rate) + 2) len *= 2;

    std::vector<std::complex<double>> buf(len);
    for (auto& v : buf) v = {rng.normal(), 0.0};
    fft1(buf, false);

    double power = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        const double cycles = std::min<double>(k, len - k);
        const double f = cycles * rate / static_cast<double>(len);
        const double g = band_gain(f, params.band_lo_hz, params.band_hi_hz);
        buf[k] *= g;
        power += g * g;
    }
    fft1(buf, true);

    // white input has unit variance per sample, so output variance is the
    // mean squared filter gain
    const double gain_rms = std::sqrt(power / static_cast<double>(len));
    const double scale = params.amplitude_px / gain_rms;

    std::vector<double> out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = buf[i].real() * scale;
    return out;
}

struct Splatter {
    explicit Splatter(int size) : kernel(size) {}

    bool deposit(double x, double y, double mass) {
        const int c = kernel.center();
        const double tx = x + c;
        const double ty = y + c;
        const int ix = static_cast<int>(std::floor(tx));
        const int iy = static_cast<int>(std::floor(ty));
        if (ix < 0 || iy < 0 || ix + 1 >= kernel.size || iy + 1 >= kernel.size)
            return false;
        const double fx = tx - ix;
        const double fy = ty - iy;
        kernel.at(iy, ix) += mass * (1 - fx) * (1 - fy);
        kernel.at(iy, ix + 1) += mass * fx * (1 - fy);
        kernel.at(iy + 1, ix) += mass * (1 - fx) * fy;
        kernel.at(iy + 1, ix + 1) += mass * fx * fy;
        return true;
    }

    BlurKernel kernel;
};

}  // namespace

BlurKernel simulate_kernel(const TremorParams& params, Rng& rng) {
    params.validate();
    const double duration = params.t_exp;  // seconds of integration
    const double theta = rng.uniform() * M_PI;  // dominant tremor direction
    const std::vector<double> major = tremor_axis(params, duration, rng);
    const std::vector<double> minor = tremor_axis(params, duration, rng);

    const double ct = std::cos(theta), st = std::sin(theta);
    const double shrink = 1.0 / params.axis_ratio;
    std::vector<double> xs(major.size()), ys(major.size());
    for (std::size_t i = 0; i < major.size(); ++i) {
        xs[i] = ct * major[i] - st * shrink * minor[i];
        ys[i] = st * major[i] + ct * shrink * minor[i];
        if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
            throw std::runtime_error("simulate_kernel: non-finite trajectory");
    }

    const double dt = 1.0 / params.sample_rate_hz;
    const double span = duration / dt;  // in sample units
    const int whole = static_cast<int>(std::floor(span));

    // piecewise-linear path positions over [0, duration]
    auto position = [&](double s) {  // s in sample units
        const int i = std::min<int>(static_cast<int>(std::floor(s)),
                                    static_cast<int>(xs.size()) - 2);
        const double f = s - i;
        return std::array<double, 2>{xs[i] * (1 - f) + xs[i + 1] * f,
                                     ys[i] * (1 - f) + ys[i + 1] * f};
    };

    // recentre the path on its time average before rasterizing
    double cx = 0.0, cy = 0.0;
    const int probe = std::max(whole + 1, 2);
    for (int i = 0; i < probe; ++i) {
        const auto p = position(std::min(span, static_cast<double>(i)));
        cx += p[0];
        cy += p[1];
    }
    cx /= probe;
    cy /= probe;

    for (int attempt = 0;; ++attempt) {
        const int size = params.grid + 16 * attempt * 2;
        Splatter splat(size % 2 == 0 ? size + 1 : size);

        bool fits = true;
        const int segments = std::max(whole, 1);
        for (int seg = 0; seg < segments && fits; ++seg) {
            const double s0 = std::min(span, static_cast<double>(seg));
            const double s1 = std::min(span, static_cast<double>(seg + 1));
            if (s1 <= s0) continue;
            const auto a = position(s0);
            const auto b = position(s1);
            const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
            const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.2)));
            const double mass = (s1 - s0) / span / steps;
            for (int j = 0; j < steps && fits; ++j) {
                const double f = (j + 0.5) / steps;
                fits = splat.deposit(a[0] * (1 - f) + b[0] * f - cx,
                                     a[1] * (1 - f) + b[1] * f - cy, mass);
            }
        }
        if (!fits) continue;  // enlarge and retry, never truncate mass

        normalize_mass(splat.kernel);
        return center_kernel(splat.kernel);
    }
}

double kernel_extent(const BlurKernel& k, double threshold) {
    double peak = 0.0;
    for (double v : k.grid) peak = std::max(peak, v);
    if (peak <= 0.0) return 0.0;
    const double cut = peak * threshold;

    std::vector<std::array<int, 2>> cells;
    for (int y = 0; y < k.size; ++y)
        for (int x = 0; x < k.size; ++x)
            if (k.at(y, x) >= cut) cells.push_back({x, y});

    double best = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const double d = std::hypot(cells[i][0] - cells[j][0],
                                        cells[i][1] - cells[j][1]);
            best = std::max(best, d);
        }
    return best;
}

std::vector<PlanarImage> synthesize_burst(const PlanarImage& ground_truth,
                                          const std::vector<BlurKernel>& kernels,
                                          double noise_sigma,
                                          std::uint64_t rng_seed) {
    if (noise_sigma < 0.0)
        throw std::invalid_argument("synthesize_burst: negative noise sigma");
    std::vector<PlanarImage> burst;
    burst.reserve(kernels.size());
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        PlanarImage frame = convolve_periodic(ground_truth, kernels[i]);
        if (noise_sigma > 0.0) {
            Rng noise(rng_seed, i, /*purpose=*/0x6e6f, 0);
            for (int c = 0; c < frame.channels; ++c)
                for (double& v : frame.planes[c]) v += noise.normal(0.0, noise_sigma);
        }
        burst.push_back(std::move(frame));
    }
    return burst;
}

PlanarImage synthetic_scene(int width, int height, std::uint64_t seed,
                            int channels) {
    if (width < 8 || height < 8)
        throw std::invalid_argument("synthetic_scene: size too small");
    PlanarImage img(width, height, channels);
    Rng rng(seed, 0x5eed, 0, 0);

    // smooth background ramp
    for (int c = 0; c < channels; ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                img.at(c, y, x) =
                    0.35 + 0.25 * (static_cast<double>(x) / width) +
                    0.15 * (static_cast<double>(y) / height);

    const int blobs = std::max(40, width * height / 400);
    for (int b = 0; b < blobs; ++b) {
        const double cx = rng.uniform() * width;
        const double cy = rng.uniform() * height;
        const double r = 1.5 + rng.uniform() * std::min(width, height) * 0.06;
        const double angle = rng.uniform() * M_PI;
        const double aspect = 0.3 + rng.uniform() * 0.7;
        std::array<double, 3> level;
        for (auto& v : level) v = 0.05 + 0.9 * rng.uniform();
        const bool rectangle = rng.uniform() < 0.4;

        const int x0 = std::max(0, static_cast<int>(cx - 2.5 * r));
        const int x1 = std::min(width - 1, static_cast<int>(cx + 2.5 * r));
        const int y0 = std::max(0, static_cast<int>(cy - 2.5 * r));
        const int y1 = std::min(height - 1, static_cast<int>(cy + 2.5 * r));
        const double ca = std::cos(angle), sa = std::sin(angle);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double dx = x - cx, dy = y - cy;
                const double u = (ca * dx + sa * dy);
                const double v = (-sa * dx + ca * dy) / aspect;
                double dist;
                if (rectangle)
                    dist = std::max(std::abs(u), std::abs(v)) - r;
                else
                    dist = std::hypot(u, v) - r;
                const double alpha = std::clamp(0.5 - dist, 0.0, 1.0);  // ~1px AA edge
                if (alpha <= 0.0) continue;
                for (int c = 0; c < channels; ++c) {
                    const double lv = channels == 1 ? level[0] : level[c];
                    img.at(c, y, x) = img.at(c, y, x) * (1 - alpha) + lv * alpha;
                }
            }
        }
    }
    return gaussian_blur(img, 0.6, Boundary::Mirror);
}

}  // namespace fba
