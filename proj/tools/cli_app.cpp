#include "cli_app.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "fba/baselines.hpp"
#include "fba/fba.hpp"
#include "fba/image_io.hpp"
#include "fba/parallel.hpp"
#include "fba/sharpen.hpp"
#include "fba/study.hpp"
#include "fba/warp.hpp"

namespace fs = std::filesystem;

namespace fba::cli {

namespace {

void add_registration_flags(CLI::App* cmd, DeblurOptions& o) {
    cmd->add_flag("--no-register", o.no_register,
                  "Treat the burst as already aligned");
    cmd->add_option("--sigma-min", o.sigma_min,
                    "Minimum feature detection scale in pixels")
        ->capture_default_str();
    cmd->add_option("--ransac-tol", o.ransac_tol,
                    "RANSAC inlier tolerance in pixels")
        ->capture_default_str();
    cmd->add_option("--ransac-iters", o.ransac_iters, "RANSAC iterations")
        ->capture_default_str();
    cmd->add_flag("--skip-unregistered", o.skip_unregistered,
                  "Drop frames that fail to register instead of aborting");
}

void add_merge_flags(CLI::App* cmd, DeblurOptions& o) {
    cmd->add_option("--p", o.p, "Weight exponent")->capture_default_str();
    cmd->add_option("--ks", o.ks, "Magnitude smoothing divisor")
        ->capture_default_str();
    cmd->add_option("--smooth-scale", o.smooth_scale,
                    "Multiplier on the smoothing sigma (0 disables)")
        ->capture_default_str();
    cmd->add_flag("--max-pool", o.max_pool,
                  "Select the per-frequency maximum instead of weighting");
    cmd->add_flag("--taper", o.taper,
                  "Apply a 16 px cosine edge taper before the transforms");
}

void add_sharpen_flags(CLI::App* cmd, DeblurOptions& o) {
    cmd->add_flag("--no-sharpen", o.no_sharpen, "Skip the sharpening stage");
    cmd->add_option("--rho", o.rho, "Sharpening Gaussian sigma")
        ->capture_default_str();
    cmd->add_option("--delta", o.delta, "Fraction of removed noise added back")
        ->capture_default_str();
    cmd->add_option("--denoiser", o.denoiser, "Denoiser: nlmeans, dct or none")
        ->capture_default_str();
    cmd->add_option("--denoise-strength", o.denoise_strength,
                    "Denoiser strength multiplier")
        ->capture_default_str();
}

void add_output_flags(CLI::App* cmd, DeblurOptions& o) {
    cmd->add_option("-o,--output", o.output, "Output image path")->required();
    cmd->add_option("--bits", o.bits, "PNG bit depth (8 or 16)")
        ->capture_default_str();
}

}  // namespace

std::unique_ptr<CLI::App> build_cli(CliOptions& opts) {
    auto app = std::make_unique<CLI::App>(
        "Burst deblurring by weighted Fourier-domain accumulation");
    app->set_config("--config", "", "key=value config file; flags win");
    app->add_option("--seed", opts.seed, "Seed for every random choice")
        ->capture_default_str();
    app->add_option("--threads", opts.threads,
                    "Worker threads (0 = hardware concurrency)")
        ->capture_default_str();
    app->require_subcommand(1);

    CLI::App* deblur =
        app->add_subcommand("deblur", "Register, merge and sharpen a burst");
    deblur
        ->add_option("inputs", opts.deblur.inputs,
                     "Input frames (files or one directory)")
        ->required();
    add_output_flags(deblur, opts.deblur);
    add_merge_flags(deblur, opts.deblur);
    add_registration_flags(deblur, opts.deblur);
    add_sharpen_flags(deblur, opts.deblur);
    deblur->add_option("--dump-weights", opts.deblur.dump_weights,
                       "Directory for per-frame weight heatmaps");
    deblur->add_option("--dump-contributions", opts.deblur.dump_contributions,
                       "Directory for per-frame contribution images");

    CLI::App* simulate = app->add_subcommand(
        "simulate", "Monte-Carlo error sweep over the weight exponent");
    simulate->add_option("--out", opts.simulate.out, "Output CSV path")->required();
    simulate->add_option("--gt", opts.simulate.ground_truth,
                         "Ground-truth image (default: built-in chart)");
    simulate->add_option("--size", opts.simulate.size,
                         "Built-in chart size in pixels")
        ->capture_default_str();
    simulate->add_option("--trials", opts.simulate.trials, "Monte-Carlo trials")
        ->capture_default_str();
    simulate->add_option("--frames", opts.simulate.frames, "Frames per burst")
        ->capture_default_str();
    simulate->add_option("--noise", opts.simulate.noise,
                         "Per-frame noise standard deviation")
        ->capture_default_str();
    simulate->add_option("--texp", opts.simulate.t_exp, "Exposure parameter")
        ->capture_default_str();
    simulate->add_option("--p", opts.simulate.p,
                         "Weight exponents (default 0..50)");
    simulate->add_option("--epsilon", opts.simulate.epsilon,
                         "Misalignment shift std devs (default 0)");
    simulate->add_option("--smooth-scale", opts.simulate.smooth_scale,
                         "Smoothing scale sweep (default 1)");
    simulate->add_option("--ks", opts.simulate.ks, "Magnitude smoothing divisor")
        ->capture_default_str();

    CLI::App* psf = app->add_subcommand(
        "psf", "Equivalent point spread function of a kernel set");
    psf->add_option("kernels", opts.psf.kernels, "Kernel images (PNG or PFM)");
    psf->add_option("--simulate", opts.psf.simulate,
                    "Simulate this many tremor kernels instead");
    psf->add_option("--texp", opts.psf.t_exp, "Exposure for simulated kernels")
        ->capture_default_str();
    psf->add_option("--p", opts.psf.p, "Weight exponents (default 0 and 11)");
    psf->add_option("--grid", opts.psf.grid, "Common kernel grid size")
        ->capture_default_str();
    psf->add_option("--out-dir", opts.psf.out_dir, "Directory for PSF images");

    CLI::App* baseline =
        app->add_subcommand("baseline", "Lucky-imaging reference methods");
    baseline
        ->add_option("inputs", opts.baseline.deblur.inputs,
                     "Input frames (files or one directory)")
        ->required();
    add_output_flags(baseline, opts.baseline.deblur);
    baseline
        ->add_option("--method", opts.baseline.method,
                     "average, lfa, joshi or freq-pct")
        ->capture_default_str();
    baseline->add_option("--k", opts.baseline.top_k, "Frames kept by lfa")
        ->capture_default_str();
    baseline->add_option("--lambda", opts.baseline.lambda,
                         "Selectivity strength for joshi")
        ->capture_default_str();
    baseline->add_option("--fraction", opts.baseline.fraction,
                         "Fraction of frames kept per frequency by freq-pct")
        ->capture_default_str();
    baseline->add_option("--block", opts.baseline.block,
                         "Dirichlet energy block size for lfa")
        ->capture_default_str();
    add_registration_flags(baseline, opts.baseline.deblur);

    CLI::App* multi = app->add_subcommand(
        "multi-burst", "Run the deblur pipeline on several bursts");
    multi
        ->add_option("bursts", opts.multi.burst_dirs,
                     "Burst directories (at least two)")
        ->required();
    multi->add_option("--out-dir", opts.multi.out_dir, "Output directory")
        ->required();
    add_merge_flags(multi, opts.multi.deblur);
    add_registration_flags(multi, opts.multi.deblur);
    add_sharpen_flags(multi, opts.multi.deblur);
    multi->add_option("--bits", opts.multi.deblur.bits, "PNG bit depth (8 or 16)")
        ->capture_default_str();

    // --seed/--threads live on the root but may appear after the subcommand
    for (CLI::App* sub : app->get_subcommands({})) sub->fallthrough();

    return app;
}

namespace {

std::vector<std::string> expand_inputs(const std::vector<std::string>& inputs) {
    if (inputs.size() == 1 && fs::is_directory(inputs[0])) {
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(inputs[0])) {
            const std::string ext = entry.path().extension().string();
            if (ext == ".png" || ext == ".pfm" || ext == ".PNG" || ext == ".PFM")
                files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw IoError("no .png or .pfm frames in " + inputs[0]);
        return files;
    }
    return inputs;
}

std::vector<PlanarImage> load_burst(const std::vector<std::string>& paths) {
    std::vector<PlanarImage> burst;
    burst.reserve(paths.size());
    for (const auto& p : paths) burst.push_back(read_image(p));
    for (const auto& f : burst)
        if (!f.same_shape(burst[0]))
            throw std::invalid_argument("frames differ in size or channels");
    return burst;
}

Denoiser parse_denoiser(const std::string& name) {
    if (name == "nlmeans") return Denoiser::NlMeans;
    if (name == "dct") return Denoiser::DctThreshold;
    if (name == "none") return Denoiser::None;
    throw CLI::ValidationError("--denoiser", "unknown denoiser " + name);
}

struct MergedBurst {
    PlanarImage image;                 // pre-sharpening merge
    std::vector<PlanarImage> cropped;  // the frames that were merged
    Rect crop;                         // where the output sits in frame 0
};

// register (unless disabled), crop to the common rectangle and merge
MergedBurst merge_pipeline(const std::vector<PlanarImage>& burst,
                           const DeblurOptions& o, std::uint64_t seed) {
    std::vector<PlanarImage> aligned;
    Rect crop{0, 0, burst[0].width, burst[0].height};
    if (!o.no_register && burst.size() > 1) {
        RegistrationParams reg;
        reg.sigma_min = o.sigma_min;
        reg.ransac_tolerance = o.ransac_tol;
        reg.ransac_iterations = o.ransac_iters;
        reg.skip_unregistered = o.skip_unregistered;
        reg.seed = seed;
        auto registration = register_burst(burst, reg);
        aligned = std::move(registration.frames);
        if (registration.crop.width > 0) crop = registration.crop;
    } else {
        aligned = burst;
    }

    MergedBurst out;
    out.crop = crop;
    out.cropped.reserve(aligned.size());
    for (auto& f : aligned) out.cropped.push_back(crop_image(f, crop));

    FbaConfig cfg;
    cfg.p = o.p;
    cfg.ks = o.ks;
    cfg.smoothing_scale = o.smooth_scale;
    cfg.max_pool = o.max_pool;

    FbaAccumulator acc(crop.width, crop.height, out.cropped[0].channels, cfg);
    for (const auto& f : out.cropped) acc.add(o.taper ? cosine_taper(f) : f);
    out.image = acc.finalize();
    return out;
}

PlanarImage maybe_sharpen(const PlanarImage& merged, const DeblurOptions& o) {
    if (o.no_sharpen) return merged;
    SharpenConfig cfg;
    cfg.rho = o.rho;
    cfg.delta = o.delta;
    cfg.denoiser = parse_denoiser(o.denoiser);
    cfg.denoise_strength = o.denoise_strength;
    return noise_aware_sharpen(merged, cfg);
}

// weight maps rendered DC-centered for viewing
void dump_weight_maps(const std::vector<MagnitudeMap>& weights,
                      const std::string& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const auto& wm = weights[i];
        PlanarImage img(wm.width, wm.height, 1);
        for (int y = 0; y < wm.height; ++y)
            for (int x = 0; x < wm.width; ++x) {
                const int sy = (y + wm.height / 2) % wm.height;
                const int sx = (x + wm.width / 2) % wm.width;
                img.at(0, sy, sx) = wm.values[static_cast<std::size_t>(y) * wm.width + x];
            }
        char name[64];
        std::snprintf(name, sizeof(name), "/weights_%03zu.png", i + 1);
        write_image(img, dir + name, 16);
    }
}

void dump_contribution_images(const std::vector<PlanarImage>& images,
                              const std::vector<double>& shares,
                              const std::string& dir) {
    fs::create_directories(dir);
    for (std::size_t i = 0; i < images.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "/contribution_%03zu.pfm", i + 1);
        write_image(images[i], dir + name);
    }
    std::FILE* f = std::fopen((dir + "/energy_shares.csv").c_str(), "wb");
    if (!f) throw IoError("cannot write " + dir + "/energy_shares.csv");
    std::fprintf(f, "frame,energy_share\n");
    for (std::size_t i = 0; i < shares.size(); ++i)
        std::fprintf(f, "%zu,%.17g\n", i + 1, shares[i]);
    std::fclose(f);
}

int cmd_deblur(const CliOptions& opts, const DeblurOptions& o,
               const std::string& output_override = "") {
    const auto burst = load_burst(expand_inputs(o.inputs));
    MergedBurst merged = merge_pipeline(burst, o, opts.seed);

    if (!o.dump_weights.empty() || !o.dump_contributions.empty()) {
        FbaConfig cfg;
        cfg.p = o.p;
        cfg.ks = o.ks;
        cfg.smoothing_scale = o.smooth_scale;
        cfg.max_pool = o.max_pool;
        const auto contrib = frame_contributions(merged.cropped, cfg);
        if (!o.dump_weights.empty()) dump_weight_maps(contrib.weights, o.dump_weights);
        if (!o.dump_contributions.empty())
            dump_contribution_images(contrib.images, contrib.energy_shares,
                                     o.dump_contributions);
    }

    const PlanarImage result = maybe_sharpen(merged.image, o);
    const std::string& out = output_override.empty() ? o.output : output_override;
    write_image(result, out, o.bits);
    std::printf("wrote %s (%d x %d at +%d+%d, %d frames)\n", out.c_str(),
                result.width, result.height, merged.crop.x, merged.crop.y,
                static_cast<int>(merged.cropped.size()));
    return 0;
}

int cmd_simulate(const CliOptions& opts, const SimulateOptions& o) {
    PlanarImage gt = o.ground_truth.empty()
                         ? synthetic_scene(o.size, o.size, opts.seed)
                         : read_image(o.ground_truth);

    StudyConfig cfg;
    cfg.frames = o.frames;
    cfg.trials = o.trials;
    cfg.noise_sigma = o.noise;
    cfg.t_exp = o.t_exp;
    cfg.ks = o.ks;
    cfg.seed = opts.seed;
    if (!o.p.empty()) cfg.p_grid = o.p;
    cfg.se_groups = std::min(10, std::max(2, o.trials / 2));

    const std::vector<double> epsilons = o.epsilon.empty()
                                             ? std::vector<double>{0.0}
                                             : o.epsilon;
    const std::vector<double> scales =
        o.smooth_scale.empty() ? std::vector<double>{1.0} : o.smooth_scale;

    std::vector<StudyResult> results;
    for (double scale : scales) {
        cfg.smoothing_scale = scale;
        auto batch = run_misalignment_study(cfg, epsilons, gt);
        for (auto& r : batch) results.push_back(std::move(r));
    }
    write_study_csv(o.out, results);
    std::printf("wrote %s (%zu rows)\n", o.out.c_str(),
                results.size() * results[0].p.size());
    return 0;
}

BlurKernel kernel_from_image(const PlanarImage& img) {
    const Plane gray = luma(img);
    const int side = std::max(img.width, img.height) | 1;
    BlurKernel k(side);
    const int ox = (side - img.width) / 2;
    const int oy = (side - img.height) / 2;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            k.at(y + oy, x + ox) =
                std::max(gray[static_cast<std::size_t>(y) * img.width + x], 0.0);
    normalize_mass(k);
    return k;
}

int cmd_psf(const CliOptions& opts, const PsfOptions& o) {
    std::vector<BlurKernel> kernels;
    if (o.simulate > 0) {
        TremorParams params;
        params.t_exp = o.t_exp;
        for (int i = 0; i < o.simulate; ++i) {
            Rng rng(opts.seed, 0x70736600ULL, i, 0);
            kernels.push_back(simulate_kernel(params, rng));
        }
    } else {
        for (const auto& path : o.kernels)
            kernels.push_back(kernel_from_image(read_image(path)));
    }
    if (kernels.empty())
        throw CLI::ValidationError("psf", "give kernel images or --simulate N");

    std::vector<double> ps = o.p.empty() ? std::vector<double>{0.0, 11.0} : o.p;
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
    for (double p : ps) {
        const EquivalentPsf psf = equivalent_psf(kernels, p, false, o.grid);
        std::printf("p=%g concentration=%.6f mass=%.6f\n", p, psf.concentration,
                    kernel_mass(psf.kernel));
        if (!o.out_dir.empty()) {
            PlanarImage img(psf.kernel.size, psf.kernel.size, 1);
            img.planes[0] = psf.kernel.grid;
            char name[64];
            std::snprintf(name, sizeof(name), "/psf_p%g.pfm", p);
            write_image(img, o.out_dir + name);
            double peak = 0.0;
            for (double v : img.planes[0]) peak = std::max(peak, v);
            if (peak > 0.0)
                for (double& v : img.planes[0]) v /= peak;
            std::snprintf(name, sizeof(name), "/psf_p%g.png", p);
            write_image(img, o.out_dir + name, 16);
        }
    }
    return 0;
}

int cmd_baseline(const CliOptions& opts, const BaselineOptions& o) {
    const auto burst = load_burst(expand_inputs(o.deblur.inputs));

    // reuse the registration/crop stage with merging disabled afterwards
    std::vector<PlanarImage> frames;
    {
        DeblurOptions reg_only = o.deblur;
        reg_only.p = 0.0;  // unused by the crop stage
        MergedBurst merged = merge_pipeline(burst, reg_only, opts.seed);
        frames = std::move(merged.cropped);
    }

    PlanarImage result;
    if (o.method == "average")
        result = align_and_average(frames);
    else if (o.method == "lfa")
        result = lucky_frame_average(frames, o.top_k, o.block);
    else if (o.method == "joshi")
        result = sharpness_selectivity_average(frames, o.lambda);
    else if (o.method == "freq-pct")
        result = frequency_percentile_fusion(frames, o.fraction);
    else
        throw CLI::ValidationError("--method", "unknown method " + o.method);

    write_image(result, o.deblur.output, o.deblur.bits);
    std::printf("wrote %s (%s over %zu frames)\n", o.deblur.output.c_str(),
                o.method.c_str(), frames.size());
    return 0;
}

int cmd_multi_burst(const CliOptions& opts, const MultiBurstOptions& o) {
    if (o.burst_dirs.size() < 2)
        throw CLI::ValidationError("multi-burst", "need at least two burst directories");
    fs::create_directories(o.out_dir);
    int failures = 0;
    for (const auto& dir : o.burst_dirs) {
        const std::string name = fs::path(dir).filename().string();
        const std::string out =
            (fs::path(o.out_dir) / (name.empty() ? "burst" : name)).string() + ".png";
        try {
            DeblurOptions burst_opts = o.deblur;
            burst_opts.inputs = {dir};
            cmd_deblur(opts, burst_opts, out);
        } catch (const std::exception& e) {
            std::fprintf(stderr, "burst %s failed: %s\n", dir.c_str(), e.what());
            ++failures;
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CliOptions opts;
    auto app = build_cli(opts);
    try {
        app->parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app->exit(e);
        return code == 0 ? 0 : 2;
    }

    set_thread_count(opts.threads);
    try {
        if (app->got_subcommand("deblur")) return cmd_deblur(opts, opts.deblur);
        if (app->got_subcommand("simulate")) return cmd_simulate(opts, opts.simulate);
        if (app->got_subcommand("psf")) return cmd_psf(opts, opts.psf);
        if (app->got_subcommand("baseline")) return cmd_baseline(opts, opts.baseline);
        if (app->got_subcommand("multi-burst"))
            return cmd_multi_burst(opts, opts.multi);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const RegistrationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

}  // namespace fba::cli
