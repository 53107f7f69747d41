#pragma once

#include "fba/image.hpp"
#include "fba/kernel.hpp"
#include "fba/rng.hpp"

namespace fba {

// Parametric hand-tremor model: displacement along a randomly oriented
// dominant axis is white Gaussian noise shaped by a bandpass with a flat
// 2-12 Hz passband and 4th-order rolloff; the cross axis carries the same
// process at 1/axis_ratio amplitude, which keeps the traces mostly
// one-dimensional. The exposure knob t_exp selects how much of the
// stationary process the shutter integrates; the default amplitude is
// calibrated so t_exp = 1/3 gives a mean kernel extent of about 10 px on
// the default 41x41 grid.
struct TremorParams {
    double t_exp = 1.0 / 3.0;       // in (0, 1]
    double band_lo_hz = 2.0;
    double band_hi_hz = 12.0;
    double sample_rate_hz = 1000.0;
    double amplitude_px = 2.3;      // RMS along the dominant axis
    double axis_ratio = 3.0;        // major-to-minor amplitude ratio
    int grid = 41;

    void validate() const;
};

// Integrates the simulated trajectory into a mass-1, centered kernel.
// Rasterization walks the piecewise-linear path in subpixel steps with
// bilinear splatting; the grid grows if the trajectory would leave it.
BlurKernel simulate_kernel(const TremorParams& params, Rng& rng);

// Largest distance between any two points of the last simulated trajectory
// is expensive to expose; instead measure the kernel footprint: maximum
// distance between cells holding at least `threshold` of the peak mass.
double kernel_extent(const BlurKernel& k, double threshold = 1e-3);

// v_i = u * k_i + n_i with periodic convolution and iid Gaussian noise of
// standard deviation noise_sigma, drawn from per-frame streams of rng_seed.
std::vector<PlanarImage> synthesize_burst(const PlanarImage& ground_truth,
                                          const std::vector<BlurKernel>& kernels,
                                          double noise_sigma,
                                          std::uint64_t rng_seed);

// Deterministic feature-rich test chart: smooth background plus anti-aliased
// discs, rectangles and line strokes, lightly smoothed.
PlanarImage synthetic_scene(int width, int height, std::uint64_t seed,
                            int channels = 1);

}  // namespace fba
