#pragma once

#include <string>
#include <vector>

#include "fba/image.hpp"
#include "fba/shake.hpp"

namespace fba {

// One Monte-Carlo sweep over the aggregation exponent p: per trial a burst
// is simulated (v_i = u * k_i + n_i, kernels centered, optional Gaussian
// kernel shifts of std epsilon for the misalignment variant) and merged for
// every p in the grid.
struct StudyConfig {
    int frames = 16;            // M
    double noise_sigma = 0.04;  // s
    double t_exp = 1.0 / 3.0;
    double epsilon = 0.0;       // misalignment shift std in pixels
    std::vector<double> p_grid; // empty -> 0..50 step 1
    int trials = 100;
    std::uint64_t seed = 0;
    double ks = 50.0;
    double smoothing_scale = 1.0;
    TremorParams tremor;        // t_exp is overridden by the field above
    int se_groups = 10;         // trial groups used for the standard errors

    void validate() const;
    std::vector<double> grid() const;
};

struct StudyResult {
    StudyConfig config;
    std::vector<double> p;
    std::vector<double> mse;       // mean over pixels and trials of (u_p - u)^2
    std::vector<double> bias2;     // mean over pixels of (mean_t u_p - u)^2
    std::vector<double> variance;  // mean over pixels of var_t u_p
    std::vector<double> bias2_se;
    std::vector<double> variance_se;
    double mean_shift_px = 0.0;    // mean |shift| when epsilon > 0

    std::size_t argmin_mse() const;
};

// Deterministic for a fixed config (streams are named per trial/frame, so
// results do not depend on thread count). Requires trials >= 2 for the
// variance term.
StudyResult run_study(const StudyConfig& config, const PlanarImage& ground_truth);

// One StudyResult per epsilon, sharing kernels/noise streams with epsilon=0.
std::vector<StudyResult> run_misalignment_study(const StudyConfig& config,
                                                const std::vector<double>& epsilons,
                                                const PlanarImage& ground_truth);

// CSV with header "p,epsilon,T_exp,M,s,trials,mse,bias2,variance", one row
// per grid point, full double precision.
std::string study_csv(const std::vector<StudyResult>& results);
void write_study_csv(const std::string& path, const std::vector<StudyResult>& results);

// The exact kernels (centered, then shifted when epsilon > 0) and noise seed
// a study uses for one trial, so tests can rebuild any trial's burst with
// synthesize_burst and cross-check against the study output.
std::vector<BlurKernel> study_trial_kernels(const StudyConfig& config, int trial,
                                            double* shift_sum = nullptr);
std::uint64_t study_trial_noise_seed(const StudyConfig& config, int trial);

}  // namespace fba
