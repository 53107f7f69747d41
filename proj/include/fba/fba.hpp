#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "fba/image.hpp"
#include "fba/kernel.hpp"

namespace fba {

// Weights are proportional to the (smoothed) spectrum magnitude raised to p.
// p = 0 reduces to the arithmetic mean of the burst; max_pool selects the
// per-frequency maximum-magnitude coefficients (the p -> infinity rule, with
// ties sharing the weight).
struct FbaConfig {
    double p = 11.0;
    double ks = 50.0;             // smoothing divisor: sigma = scale*min(h,w)/ks
    double smoothing_scale = 1.0; // 0 disables magnitude smoothing
    bool max_pool = false;

    void validate() const;
};

// Guard for bins where every frame's magnitude vanishes; such bins fall back
// to the plain mean.
inline constexpr double kMagnitudeEps = 1e-12;
// Relative tolerance for tied maxima in max_pool mode.
inline constexpr double kMaxPoolTieTol = 1e-9;

// |spectrum| smoothed with a periodic Gaussian of
// sigma = smoothing_scale * min(width, height) / ks.
MagnitudeMap smooth_magnitude(const Spectrum& spectrum, double ks,
                              double smoothing_scale);

// Per-frequency normalized weights from already-smoothed magnitudes.
// Each bin's weights are nonnegative and sum to 1.
std::vector<MagnitudeMap> fourier_weights(const std::vector<MagnitudeMap>& mags,
                                          double p, bool max_pool = false);

// Streaming weighted Fourier accumulation. State per frequency bin is a
// weighted spectrum sum, a weight sum, and the running peak magnitude used
// as the scaling reference, so arbitrarily large p never overflows. Memory
// does not grow with the number of frames.
class FbaAccumulator {
public:
    FbaAccumulator(int width, int height, int channels, FbaConfig config);

    // Adds one registered frame. Color frames contribute the channel-mean
    // magnitude (smoothed) as the shared weight for all channels.
    void add(const PlanarImage& frame);

    // Adds a frame whose spectra are already available. The magnitude map
    // must be the smoothed channel-mean magnitude matching `spectra`.
    void add_spectra(const std::vector<Spectrum>& spectra,
                     const MagnitudeMap& smoothed_magnitude);

    // Order-independent combination of two partial accumulations.
    void merge(const FbaAccumulator& other);

    // Weighted average -> inverse transform. Output is not clamped.
    PlanarImage finalize(double* max_abs_imag = nullptr) const;

    // Clears the accumulation state; scratch buffers stay allocated so a
    // reused accumulator runs allocation-free.
    void reset();

    int frames_seen() const { return frames_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    const FbaConfig& config() const { return config_; }

    // Bytes held by the persistent per-bin state (spectrum sum, weight sum,
    // peak magnitude). Independent of the number of frames accumulated.
    std::size_t state_bytes() const;
    // Additional scratch bytes used while adding one frame.
    std::size_t transient_bytes() const;

private:
    void accumulate_bins(const std::complex<double>* const* spectra,
                         const double* magnitudes);

    int width_, height_, channels_;
    FbaConfig config_;
    int frames_ = 0;
    std::vector<std::vector<std::complex<double>>> weighted_;  // per channel
    std::vector<double> weight_sum_;
    std::vector<double> peak_mag_;
    // per-frame scratch, reused across add() calls
    std::vector<std::vector<std::complex<double>>> spec_scratch_;
    std::vector<double> mag_scratch_;
    std::vector<double> blur_scratch_;
};

// Convenience wrapper: accumulate the whole burst and finalize.
PlanarImage fba_merge(const std::vector<PlanarImage>& frames,
                      const FbaConfig& config);

// Pre-FFT cosine edge taper (Tukey-style ramp over `border` pixels),
// optionally applied by callers on heavily misregistered bursts.
PlanarImage cosine_taper(const PlanarImage& img, int border = 16);

struct FrameContributions {
    std::vector<PlanarImage> images;    // sum per pixel to the merged output
    std::vector<double> energy_shares;  // nonnegative, sum to 1
    std::vector<MagnitudeMap> weights;  // the per-frame weight maps
};

// Decomposes the merged output into the per-frame filtered terms and their
// spectral energy shares.
FrameContributions frame_contributions(const std::vector<PlanarImage>& frames,
                                       const FbaConfig& config);

struct EquivalentPsf {
    BlurKernel kernel;     // may carry small negatives from phase mixing
    double concentration;  // fraction of squared mass inside the central 3x3
};

// The single kernel equivalent to aggregating the given blur kernels with
// magnitude weights (no smoothing). Kernels are embedded centered on a
// common odd grid of at least `grid` cells per side.
EquivalentPsf equivalent_psf(const std::vector<BlurKernel>& kernels, double p,
                             bool max_pool = false, int grid = 41);

}  // namespace fba
