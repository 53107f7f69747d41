#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fba/baselines.hpp"
#include "fba/fba.hpp"
#include "fba/image_io.hpp"
#include "fba/parallel.hpp"
#include "fba/sharpen.hpp"
#include "fba/study.hpp"
#include "fba/warp.hpp"

namespace py = pybind11;
using namespace fba;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PlanarImage to_image(const Array& arr) {
    const auto buf = arr.request();
    if (buf.ndim == 2) {
        PlanarImage img(static_cast<int>(buf.shape[1]),
                        static_cast<int>(buf.shape[0]), 1);
        const double* data = static_cast<const double*>(buf.ptr);
        std::copy(data, data + img.pixel_count(), img.planes[0].begin());
        return img;
    }
    if (buf.ndim == 3 && buf.shape[2] == 3) {
        PlanarImage img(static_cast<int>(buf.shape[1]),
                        static_cast<int>(buf.shape[0]), 3);
        const double* data = static_cast<const double*>(buf.ptr);
        for (std::size_t i = 0; i < img.pixel_count(); ++i)
            for (int c = 0; c < 3; ++c) img.planes[c][i] = data[i * 3 + c];
        return img;
    }
    throw std::invalid_argument("expected an (H, W) or (H, W, 3) float array");
}

py::array from_image(const PlanarImage& img) {
    if (img.channels == 1) {
        py::array_t<double> out({img.height, img.width});
        std::copy(img.planes[0].begin(), img.planes[0].end(),
                  out.mutable_data());
        return out;
    }
    py::array_t<double> out({img.height, img.width, 3});
    double* data = out.mutable_data();
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        for (int c = 0; c < 3; ++c) data[i * 3 + c] = img.planes[c][i];
    return out;
}

std::vector<PlanarImage> to_burst(const std::vector<Array>& frames) {
    std::vector<PlanarImage> burst;
    burst.reserve(frames.size());
    for (const auto& f : frames) burst.push_back(to_image(f));
    return burst;
}

BlurKernel to_kernel(const Array& arr) {
    const auto buf = arr.request();
    if (buf.ndim != 2 || buf.shape[0] != buf.shape[1] || buf.shape[0] % 2 == 0)
        throw std::invalid_argument("kernel must be a square odd-sized array");
    BlurKernel k(static_cast<int>(buf.shape[0]));
    const double* data = static_cast<const double*>(buf.ptr);
    std::copy(data, data + k.grid.size(), k.grid.begin());
    return k;
}

py::array from_kernel(const BlurKernel& k) {
    py::array_t<double> out({k.size, k.size});
    std::copy(k.grid.begin(), k.grid.end(), out.mutable_data());
    return out;
}

Denoiser parse_denoiser(const std::string& name) {
    if (name == "nlmeans") return Denoiser::NlMeans;
    if (name == "dct") return Denoiser::DctThreshold;
    if (name == "none") return Denoiser::None;
    throw std::invalid_argument("unknown denoiser " + name);
}

FbaConfig make_config(double p, double ks, double smoothing_scale, bool max_pool) {
    FbaConfig cfg;
    cfg.p = p;
    cfg.ks = ks;
    cfg.smoothing_scale = smoothing_scale;
    cfg.max_pool = max_pool;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_fba, m) {
    m.doc() = "Burst deblurring by weighted Fourier-domain accumulation";

    m.def(
        "merge_burst",
        [](const std::vector<Array>& frames, double p, double ks,
           double smoothing_scale, bool max_pool) {
            return from_image(
                fba_merge(to_burst(frames), make_config(p, ks, smoothing_scale, max_pool)));
        },
        py::arg("frames"), py::arg("p") = 11.0, py::arg("ks") = 50.0,
        py::arg("smoothing_scale") = 1.0, py::arg("max_pool") = false,
        "Weighted Fourier merge of an aligned burst.");

    m.def(
        "register_burst",
        [](const std::vector<Array>& frames, double sigma_min, double ransac_tol,
           int ransac_iters, std::uint64_t seed, bool skip_unregistered) {
            RegistrationParams params;
            params.sigma_min = sigma_min;
            params.ransac_tolerance = ransac_tol;
            params.ransac_iterations = ransac_iters;
            params.seed = seed;
            params.skip_unregistered = skip_unregistered;
            const auto reg = register_burst(to_burst(frames), params);

            py::list aligned;
            for (const auto& f : reg.frames) aligned.append(from_image(f));
            py::list homographies;
            for (const auto& h : reg.homographies) {
                py::array_t<double> m({3, 3});
                std::copy(h.m.begin(), h.m.end(), m.mutable_data());
                homographies.append(m);
            }
            py::dict out;
            out["frames"] = aligned;
            out["homographies"] = homographies;
            out["crop"] = py::make_tuple(reg.crop.x, reg.crop.y, reg.crop.width,
                                         reg.crop.height);
            out["kept"] = reg.kept;
            return out;
        },
        py::arg("frames"), py::arg("sigma_min") = 1.8, py::arg("ransac_tol") = 2.0,
        py::arg("ransac_iters") = 2000, py::arg("seed") = 0,
        py::arg("skip_unregistered") = false,
        "Align every frame to the first via a dominant homography.");

    m.def(
        "deblur_burst",
        [](const std::vector<Array>& frames, double p, double ks,
           double smoothing_scale, bool max_pool, bool registration,
           double sigma_min, std::uint64_t seed, bool sharpen, double rho,
           double delta, const std::string& denoiser) {
            auto burst = to_burst(frames);
            std::vector<PlanarImage> aligned;
            Rect crop{0, 0, burst[0].width, burst[0].height};
            if (registration && burst.size() > 1) {
                RegistrationParams params;
                params.sigma_min = sigma_min;
                params.seed = seed;
                auto reg = register_burst(burst, params);
                aligned = std::move(reg.frames);
                if (reg.crop.width > 0) crop = reg.crop;
            } else {
                aligned = std::move(burst);
            }
            for (auto& f : aligned) f = crop_image(f, crop);
            PlanarImage merged =
                fba_merge(aligned, make_config(p, ks, smoothing_scale, max_pool));
            if (sharpen) {
                SharpenConfig cfg;
                cfg.rho = rho;
                cfg.delta = delta;
                cfg.denoiser = parse_denoiser(denoiser);
                merged = noise_aware_sharpen(merged, cfg);
            }
            return from_image(merged);
        },
        py::arg("frames"), py::arg("p") = 11.0, py::arg("ks") = 50.0,
        py::arg("smoothing_scale") = 1.0, py::arg("max_pool") = false,
        py::arg("registration") = true, py::arg("sigma_min") = 1.8,
        py::arg("seed") = 0, py::arg("sharpen") = true, py::arg("rho") = 2.0,
        py::arg("delta") = 0.4, py::arg("denoiser") = "nlmeans",
        "Register, merge and optionally sharpen a burst.");

    m.def(
        "frame_contributions",
        [](const std::vector<Array>& frames, double p, double ks,
           double smoothing_scale, bool max_pool) {
            const auto contrib = frame_contributions(
                to_burst(frames), make_config(p, ks, smoothing_scale, max_pool));
            py::list images;
            for (const auto& img : contrib.images) images.append(from_image(img));
            py::list weights;
            for (const auto& w : contrib.weights) {
                py::array_t<double> arr({w.height, w.width});
                std::copy(w.values.begin(), w.values.end(), arr.mutable_data());
                weights.append(arr);
            }
            py::dict out;
            out["images"] = images;
            out["energy_shares"] = contrib.energy_shares;
            out["weights"] = weights;
            return out;
        },
        py::arg("frames"), py::arg("p") = 11.0, py::arg("ks") = 50.0,
        py::arg("smoothing_scale") = 1.0, py::arg("max_pool") = false,
        "Per-frame filtered terms, weight maps and energy shares.");

    m.def(
        "noise_aware_sharpen",
        [](const Array& image, double rho, double delta,
           const std::string& denoiser, double strength) {
            SharpenConfig cfg;
            cfg.rho = rho;
            cfg.delta = delta;
            cfg.denoiser = parse_denoiser(denoiser);
            cfg.denoise_strength = strength;
            return from_image(noise_aware_sharpen(to_image(image), cfg));
        },
        py::arg("image"), py::arg("rho") = 2.0, py::arg("delta") = 0.4,
        py::arg("denoiser") = "nlmeans", py::arg("strength") = 1.0,
        "Denoise, unsharp-mask and re-inject a fraction of the noise.");

    m.def(
        "simulate_kernel",
        [](double t_exp, std::uint64_t seed, int grid, double amplitude) {
            TremorParams params;
            params.t_exp = t_exp;
            params.grid = grid;
            params.amplitude_px = amplitude;
            Rng rng(seed);
            return from_kernel(simulate_kernel(params, rng));
        },
        py::arg("t_exp") = 1.0 / 3.0, py::arg("seed") = 0, py::arg("grid") = 41,
        py::arg("amplitude") = 2.3,
        "One random hand-tremor blur kernel (mass 1, centered).");

    m.def(
        "equivalent_psf",
        [](const std::vector<Array>& kernels, double p, bool max_pool, int grid) {
            std::vector<BlurKernel> ks;
            ks.reserve(kernels.size());
            for (const auto& k : kernels) ks.push_back(to_kernel(k));
            const EquivalentPsf psf = equivalent_psf(ks, p, max_pool, grid);
            return py::make_tuple(from_kernel(psf.kernel), psf.concentration);
        },
        py::arg("kernels"), py::arg("p") = 11.0, py::arg("max_pool") = false,
        py::arg("grid") = 41,
        "Kernel equivalent to merging the given blurs; returns (psf, concentration).");

    m.def(
        "synthesize_burst",
        [](const Array& ground_truth, const std::vector<Array>& kernels,
           double noise_sigma, std::uint64_t seed) {
            std::vector<BlurKernel> ks;
            for (const auto& k : kernels) ks.push_back(to_kernel(k));
            py::list out;
            for (const auto& f :
                 synthesize_burst(to_image(ground_truth), ks, noise_sigma, seed))
                out.append(from_image(f));
            return out;
        },
        py::arg("ground_truth"), py::arg("kernels"), py::arg("noise_sigma") = 0.0,
        py::arg("seed") = 0, "Blur + noise realizations of a sharp image.");

    m.def(
        "align_and_average",
        [](const std::vector<Array>& frames) {
            return from_image(align_and_average(to_burst(frames)));
        },
        py::arg("frames"));
    m.def(
        "lucky_frame_average",
        [](const std::vector<Array>& frames, int top_k, int block) {
            return from_image(lucky_frame_average(to_burst(frames), top_k, block));
        },
        py::arg("frames"), py::arg("top_k") = 1, py::arg("block") = 100);
    m.def(
        "sharpness_selectivity_average",
        [](const std::vector<Array>& frames, double lam) {
            return from_image(sharpness_selectivity_average(to_burst(frames), lam));
        },
        py::arg("frames"), py::arg("lambda_") = 50.0);
    m.def(
        "frequency_percentile_fusion",
        [](const std::vector<Array>& frames, double fraction) {
            return from_image(frequency_percentile_fusion(to_burst(frames), fraction));
        },
        py::arg("frames"), py::arg("top_fraction") = 0.1);

    m.def(
        "run_study",
        [](const Array& ground_truth, int frames, double noise_sigma, double t_exp,
           double epsilon, std::vector<double> p_grid, int trials,
           std::uint64_t seed) {
            StudyConfig cfg;
            cfg.frames = frames;
            cfg.noise_sigma = noise_sigma;
            cfg.t_exp = t_exp;
            cfg.epsilon = epsilon;
            cfg.p_grid = std::move(p_grid);
            cfg.trials = trials;
            cfg.seed = seed;
            cfg.se_groups = std::min(10, std::max(2, trials / 2));
            const StudyResult r = run_study(cfg, to_image(ground_truth));
            py::dict out;
            out["p"] = r.p;
            out["mse"] = r.mse;
            out["bias2"] = r.bias2;
            out["variance"] = r.variance;
            out["csv"] = study_csv({r});
            return out;
        },
        py::arg("ground_truth"), py::arg("frames") = 16,
        py::arg("noise_sigma") = 0.04, py::arg("t_exp") = 1.0 / 3.0,
        py::arg("epsilon") = 0.0, py::arg("p_grid") = std::vector<double>{},
        py::arg("trials") = 100, py::arg("seed") = 0,
        "Monte-Carlo mse/bias/variance sweep over the weight exponent.");

    m.def(
        "synthetic_scene",
        [](int width, int height, std::uint64_t seed, int channels) {
            return from_image(synthetic_scene(width, height, seed, channels));
        },
        py::arg("width"), py::arg("height"), py::arg("seed") = 0,
        py::arg("channels") = 1, "Deterministic feature-rich test chart.");

    m.def(
        "read_image",
        [](const std::string& path) { return from_image(read_image(path)); },
        py::arg("path"));
    m.def(
        "write_image",
        [](const Array& image, const std::string& path, int png_bits) {
            write_image(to_image(image), path, png_bits);
        },
        py::arg("image"), py::arg("path"), py::arg("png_bits") = 8);

    m.def("set_thread_count", &set_thread_count, py::arg("n"));
}
