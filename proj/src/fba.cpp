#include "fba/fba.hpp"

#include <cmath>
#include <stdexcept>

#include "fba/fft.hpp"
#include "fba/gaussian.hpp"

namespace fba {

void FbaConfig::validate() const {
    if (p < 0.0) throw std::invalid_argument("FbaConfig: p must be nonnegative");
    if (ks <= 0.0) throw std::invalid_argument("FbaConfig: ks must be positive");
    if (smoothing_scale < 0.0)
        throw std::invalid_argument("FbaConfig: smoothing_scale must be nonnegative");
}

MagnitudeMap smooth_magnitude(const Spectrum& spectrum, double ks,
                              double smoothing_scale) {
    if (ks <= 0.0) throw std::invalid_argument("smooth_magnitude: ks must be positive");
    MagnitudeMap mag = magnitude(spectrum);
    if (smoothing_scale == 0.0) return mag;
    const double sigma =
        smoothing_scale * std::min(spectrum.width, spectrum.height) / ks;
    return gaussian_blur(mag, sigma);
}

std::vector<MagnitudeMap> fourier_weights(const std::vector<MagnitudeMap>& mags,
                                          double p, bool max_pool) {
    if (mags.empty()) throw std::invalid_argument("fourier_weights: empty input");
    const int w = mags[0].width, h = mags[0].height;
    const std::size_t n = mags[0].values.size();
    for (const auto& m : mags)
        if (m.width != w || m.height != h)
            throw std::invalid_argument("fourier_weights: dimension mismatch");
    if (p < 0.0) throw std::invalid_argument("fourier_weights: p must be nonnegative");

    const std::size_t count = mags.size();
    std::vector<MagnitudeMap> weights(count, MagnitudeMap(w, h));

    for (std::size_t i = 0; i < n; ++i) {
        double peak = 0.0;
        for (const auto& m : mags) peak = std::max(peak, m.values[i]);

        if (peak <= kMagnitudeEps) {
            const double uniform = 1.0 / static_cast<double>(count);
            for (auto& wm : weights) wm.values[i] = uniform;
            continue;
        }

        if (max_pool) {
            const double cutoff = peak * (1.0 - kMaxPoolTieTol);
            int ties = 0;
            for (const auto& m : mags)
                if (m.values[i] >= cutoff) ++ties;
            const double share = 1.0 / ties;
            for (std::size_t f = 0; f < count; ++f)
                weights[f].values[i] = mags[f].values[i] >= cutoff ? share : 0.0;
            continue;
        }

        // (m/peak)^p keeps the ratios of the textbook formula while staying
        // finite for any p
        double total = 0.0;
        for (std::size_t f = 0; f < count; ++f) {
            const double r = mags[f].values[i] / peak;
            const double wp = p == 0.0 ? 1.0 : std::pow(r, p);
            weights[f].values[i] = wp;
            total += wp;
        }
        for (std::size_t f = 0; f < count; ++f) weights[f].values[i] /= total;
    }
    return weights;
}

FbaAccumulator::FbaAccumulator(int width, int height, int channels, FbaConfig config)
    : width_(width), height_(height), channels_(channels), config_(config) {
    if (width < 1 || height < 1 || (channels != 1 && channels != 3))
        throw std::invalid_argument("FbaAccumulator: bad dimensions");
    config_.validate();
    const std::size_t n = static_cast<std::size_t>(width) * height;
    weighted_.assign(channels, std::vector<std::complex<double>>(n, {0.0, 0.0}));
    weight_sum_.assign(n, 0.0);
    peak_mag_.assign(n, 0.0);
}

void FbaAccumulator::add(const PlanarImage& frame) {
    if (frame.width != width_ || frame.height != height_ ||
        frame.channels != channels_)
        throw std::invalid_argument("FbaAccumulator: frame shape mismatch");

    const std::size_t n = weight_sum_.size();
    if (spec_scratch_.empty()) {
        spec_scratch_.assign(channels_,
                             std::vector<std::complex<double>>(n));
        mag_scratch_.assign(n, 0.0);
    }

    std::fill(mag_scratch_.begin(), mag_scratch_.end(), 0.0);
    for (int c = 0; c < channels_; ++c) {
        auto& spec = spec_scratch_[c];
        const Plane& plane = frame.planes[c];
        for (std::size_t i = 0; i < n; ++i) spec[i] = {plane[i], 0.0};
        fft2_inplace(spec, width_, height_, /*inverse=*/false);
        for (std::size_t i = 0; i < n; ++i) mag_scratch_[i] += std::abs(spec[i]);
    }
    const double inv_ch = 1.0 / channels_;
    for (double& v : mag_scratch_) v *= inv_ch;

    if (config_.smoothing_scale > 0.0) {
        const double sigma =
            config_.smoothing_scale * std::min(width_, height_) / config_.ks;
        gaussian_blur_into(mag_scratch_, blur_scratch_, width_, height_, sigma,
                           Boundary::Periodic);
    }

    std::vector<const std::complex<double>*> spectra(channels_);
    for (int c = 0; c < channels_; ++c) spectra[c] = spec_scratch_[c].data();
    accumulate_bins(spectra.data(), mag_scratch_.data());
}

void FbaAccumulator::add_spectra(const std::vector<Spectrum>& spectra,
                                 const MagnitudeMap& mag) {
    if (static_cast<int>(spectra.size()) != channels_)
        throw std::invalid_argument("FbaAccumulator: channel count mismatch");
    for (const auto& s : spectra)
        if (s.width != width_ || s.height != height_)
            throw std::invalid_argument("FbaAccumulator: spectrum shape mismatch");
    if (mag.width != width_ || mag.height != height_)
        throw std::invalid_argument("FbaAccumulator: magnitude shape mismatch");

    std::vector<const std::complex<double>*> bins(channels_);
    for (int c = 0; c < channels_; ++c) bins[c] = spectra[c].bins.data();
    accumulate_bins(bins.data(), mag.values.data());
}

void FbaAccumulator::accumulate_bins(const std::complex<double>* const* spectra,
                                     const double* magnitudes) {
    const std::size_t n = weight_sum_.size();
    const double p = config_.p;

    for (std::size_t i = 0; i < n; ++i) {
        const double m = magnitudes[i];
        const double peak = peak_mag_[i];

        if (config_.max_pool) {
            if (m <= kMagnitudeEps && peak <= kMagnitudeEps) {
                // all-silent bin so far: keep averaging
                weight_sum_[i] += 1.0;
                for (int c = 0; c < channels_; ++c) weighted_[c][i] += spectra[c][i];
            } else if (m > peak * (1.0 + kMaxPoolTieTol)) {
                peak_mag_[i] = m;
                weight_sum_[i] = 1.0;
                for (int c = 0; c < channels_; ++c) weighted_[c][i] = spectra[c][i];
            } else if (m >= peak * (1.0 - kMaxPoolTieTol)) {
                weight_sum_[i] += 1.0;
                for (int c = 0; c < channels_; ++c) weighted_[c][i] += spectra[c][i];
            }
            continue;
        }

        if (m <= kMagnitudeEps && peak <= kMagnitudeEps) {
            // degenerate bin: weight 1 each, finalize yields the mean
            weight_sum_[i] += 1.0;
            for (int c = 0; c < channels_; ++c) weighted_[c][i] += spectra[c][i];
        } else if (m <= peak) {
            const double r = p == 0.0 ? 1.0 : std::pow(m / peak, p);
            weight_sum_[i] += r;
            for (int c = 0; c < channels_; ++c)
                weighted_[c][i] += r * spectra[c][i];
        } else {
            // new running peak: rescale past contributions to the new reference
            const double r = p == 0.0 ? 1.0 : std::pow(peak / m, p);
            peak_mag_[i] = m;
            weight_sum_[i] = weight_sum_[i] * r + 1.0;
            for (int c = 0; c < channels_; ++c)
                weighted_[c][i] = weighted_[c][i] * r + spectra[c][i];
        }
    }
    ++frames_;
}

void FbaAccumulator::reset() {
    frames_ = 0;
    std::fill(weight_sum_.begin(), weight_sum_.end(), 0.0);
    std::fill(peak_mag_.begin(), peak_mag_.end(), 0.0);
    for (auto& ch : weighted_)
        std::fill(ch.begin(), ch.end(), std::complex<double>{0.0, 0.0});
}

void FbaAccumulator::merge(const FbaAccumulator& other) {
    if (other.width_ != width_ || other.height_ != height_ ||
        other.channels_ != channels_)
        throw std::invalid_argument("FbaAccumulator: merge shape mismatch");
    const std::size_t n = weight_sum_.size();
    const double p = config_.p;

    for (std::size_t i = 0; i < n; ++i) {
        const double pa = peak_mag_[i];
        const double pb = other.peak_mag_[i];

        if (config_.max_pool) {
            if (pb > pa * (1.0 + kMaxPoolTieTol)) {
                peak_mag_[i] = pb;
                weight_sum_[i] = other.weight_sum_[i];
                for (int c = 0; c < channels_; ++c)
                    weighted_[c][i] = other.weighted_[c][i];
            } else if (pb >= pa * (1.0 - kMaxPoolTieTol)) {
                weight_sum_[i] += other.weight_sum_[i];
                for (int c = 0; c < channels_; ++c)
                    weighted_[c][i] += other.weighted_[c][i];
            }
            continue;
        }

        if (pb <= kMagnitudeEps && pa <= kMagnitudeEps) {
            weight_sum_[i] += other.weight_sum_[i];
            for (int c = 0; c < channels_; ++c)
                weighted_[c][i] += other.weighted_[c][i];
        } else if (pb <= pa) {
            const double r = p == 0.0 ? 1.0 : std::pow(pb / pa, p);
            weight_sum_[i] += r * other.weight_sum_[i];
            for (int c = 0; c < channels_; ++c)
                weighted_[c][i] += r * other.weighted_[c][i];
        } else {
            const double r = p == 0.0 ? 1.0 : std::pow(pa / pb, p);
            peak_mag_[i] = pb;
            weight_sum_[i] = weight_sum_[i] * r + other.weight_sum_[i];
            for (int c = 0; c < channels_; ++c)
                weighted_[c][i] = weighted_[c][i] * r + other.weighted_[c][i];
        }
    }
    frames_ += other.frames_;
}

PlanarImage FbaAccumulator::finalize(double* max_abs_imag) const {
    if (frames_ == 0)
        throw std::runtime_error("FbaAccumulator: finalize on empty accumulator");

    PlanarImage out(width_, height_, channels_);
    double imag_peak = 0.0;
    Spectrum avg(width_, height_);
    for (int c = 0; c < channels_; ++c) {
        for (std::size_t i = 0; i < avg.bins.size(); ++i)
            avg.bins[i] = weighted_[c][i] / std::max(weight_sum_[i], kMagnitudeEps);
        double im = 0.0;
        out.planes[c] = ifft2(avg, &im);
        imag_peak = std::max(imag_peak, im);
    }
    if (max_abs_imag) *max_abs_imag = imag_peak;
    return out;
}

std::size_t FbaAccumulator::state_bytes() const {
    std::size_t bytes = weight_sum_.size() * sizeof(double);
    bytes += peak_mag_.size() * sizeof(double);
    for (const auto& ch : weighted_) bytes += ch.size() * sizeof(std::complex<double>);
    return bytes;
}

std::size_t FbaAccumulator::transient_bytes() const {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    // per-channel in-place spectrum of the incoming frame, its magnitude map
    // and the smoothing scratch plane
    return channels_ * n * sizeof(std::complex<double>) + 2 * n * sizeof(double);
}

PlanarImage fba_merge(const std::vector<PlanarImage>& frames,
                      const FbaConfig& config) {
    if (frames.empty()) throw std::invalid_argument("fba_merge: empty burst");
    FbaAccumulator acc(frames[0].width, frames[0].height, frames[0].channels, config);
    for (const auto& f : frames) acc.add(f);
    return acc.finalize();
}

PlanarImage cosine_taper(const PlanarImage& img, int border) {
    if (border <= 0) return img;
    auto ramp = [&](int i, int n) {
        const int d = std::min(i, n - 1 - i);
        if (d >= border) return 1.0;
        return 0.5 - 0.5 * std::cos(M_PI * (d + 0.5) / border);
    };
    PlanarImage out = img;
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < img.height; ++y) {
            const double wy = ramp(y, img.height);
            for (int x = 0; x < img.width; ++x)
                out.at(c, y, x) *= wy * ramp(x, img.width);
        }
    return out;
}

FrameContributions frame_contributions(const std::vector<PlanarImage>& frames,
                                       const FbaConfig& config) {
    if (frames.empty())
        throw std::invalid_argument("frame_contributions: empty burst");
    config.validate();
    const int w = frames[0].width, h = frames[0].height, ch = frames[0].channels;
    for (const auto& f : frames)
        if (!f.same_shape(frames[0]))
            throw std::invalid_argument("frame_contributions: frame shape mismatch");

    const std::size_t count = frames.size();
    std::vector<std::vector<Spectrum>> spectra(count);
    std::vector<MagnitudeMap> mags(count);
    for (std::size_t f = 0; f < count; ++f) {
        spectra[f].reserve(ch);
        MagnitudeMap mean_mag(w, h);
        for (int c = 0; c < ch; ++c) {
            spectra[f].push_back(fft2_plane(frames[f], c));
            for (std::size_t i = 0; i < mean_mag.values.size(); ++i)
                mean_mag.values[i] += std::abs(spectra[f][c].bins[i]);
        }
        for (double& v : mean_mag.values) v /= ch;
        if (config.smoothing_scale > 0.0) {
            const double sigma = config.smoothing_scale * std::min(w, h) / config.ks;
            mean_mag = gaussian_blur(mean_mag, sigma);
        }
        mags[f] = std::move(mean_mag);
    }

    auto weights = fourier_weights(mags, config.p, config.max_pool);

    FrameContributions result;
    result.weights = weights;
    result.images.reserve(count);
    result.energy_shares.assign(count, 0.0);

    double total_energy = 0.0;
    for (std::size_t f = 0; f < count; ++f) {
        PlanarImage contrib(w, h, ch);
        double energy = 0.0;
        Spectrum filtered(w, h);
        for (int c = 0; c < ch; ++c) {
            for (std::size_t i = 0; i < filtered.bins.size(); ++i) {
                filtered.bins[i] = weights[f].values[i] * spectra[f][c].bins[i];
                energy += std::norm(filtered.bins[i]);
            }
            contrib.planes[c] = ifft2(filtered);
        }
        result.images.push_back(std::move(contrib));
        result.energy_shares[f] = energy;
        total_energy += energy;
    }
    if (total_energy > 0.0)
        for (double& e : result.energy_shares) e /= total_energy;
    return result;
}

EquivalentPsf equivalent_psf(const std::vector<BlurKernel>& kernels, double p,
                             bool max_pool, int grid) {
    if (kernels.empty()) throw std::invalid_argument("equivalent_psf: empty kernel list");
    int size = grid % 2 == 0 ? grid + 1 : grid;
    for (const auto& k : kernels) size = std::max(size, k.size);

    const std::size_t count = kernels.size();
    std::vector<Spectrum> spectra;
    spectra.reserve(count);
    std::vector<MagnitudeMap> mags;
    mags.reserve(count);
    for (const auto& k : kernels) {
        const BlurKernel e = embed_kernel(k, size);
        Spectrum s = fft2(e.grid, size, size);
        mags.push_back(magnitude(s));
        spectra.push_back(std::move(s));
    }

    auto weights = fourier_weights(mags, p, max_pool);

    Spectrum merged(size, size);
    for (std::size_t f = 0; f < count; ++f)
        for (std::size_t i = 0; i < merged.bins.size(); ++i)
            merged.bins[i] += weights[f].values[i] * spectra[f].bins[i];

    EquivalentPsf out;
    out.kernel = BlurKernel(size);
    out.kernel.grid = ifft2(merged);

    double total = 0.0, central = 0.0;
    const int c = out.kernel.center();
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double v = out.kernel.at(y, x);
            total += v * v;
            if (std::abs(x - c) <= 1 && std::abs(y - c) <= 1) central += v * v;
        }
    out.concentration = total > 0.0 ? central / total : 0.0;
    return out;
}

}  // namespace fba
