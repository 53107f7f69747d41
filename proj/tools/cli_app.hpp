#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fba::cli {

struct DeblurOptions {
    std::vector<std::string> inputs;
    std::string output;
    double p = 11.0;
    double ks = 50.0;
    double smooth_scale = 1.0;
    bool max_pool = false;
    bool no_register = false;
    double sigma_min = 1.8;
    double ransac_tol = 2.0;
    int ransac_iters = 2000;
    bool skip_unregistered = false;
    bool taper = false;
    bool no_sharpen = false;
    double rho = 2.0;
    double delta = 0.4;
    std::string denoiser = "nlmeans";
    double denoise_strength = 1.0;
    std::string dump_weights;
    std::string dump_contributions;
    int bits = 8;
};

struct SimulateOptions {
    std::string out;
    std::string ground_truth;
    int size = 128;
    int trials = 100;
    int frames = 16;
    double noise = 0.04;
    double t_exp = 1.0 / 3.0;
    std::vector<double> p;
    std::vector<double> epsilon;
    std::vector<double> smooth_scale;
    double ks = 50.0;
};

struct PsfOptions {
    std::vector<std::string> kernels;
    int simulate = 0;
    double t_exp = 1.0 / 3.0;
    std::vector<double> p;
    int grid = 41;
    std::string out_dir;
};

struct BaselineOptions {
    DeblurOptions deblur;  // shares inputs/registration/output handling
    std::string method = "average";
    int top_k = 1;
    double lambda = 50.0;
    double fraction = 0.1;
    int block = 100;
};

struct MultiBurstOptions {
    std::vector<std::string> burst_dirs;
    std::string out_dir;
    DeblurOptions deblur;
};

struct CliOptions {
    DeblurOptions deblur;
    SimulateOptions simulate;
    PsfOptions psf;
    BaselineOptions baseline;
    MultiBurstOptions multi;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency
};

// Registers every subcommand and option on a fresh app. The returned app
// refers into `opts`, which must outlive it.
std::unique_ptr<CLI::App> build_cli(CliOptions& opts);

// Full entry point: parse + dispatch. Exit codes: 0 success, 1 processing
// failure, 2 usage or I/O errors.
int run_cli(int argc, const char* const* argv);

}  // namespace fba::cli
