#include "fba/study.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fba/fba.hpp"
#include "fba/fft.hpp"
#include "fba/gaussian.hpp"
#include "fba/image_io.hpp"
#include "fba/parallel.hpp"

namespace fba {

namespace {
constexpr std::uint64_t kKernelTag = 0x6b65726eULL;  // kernel streams
constexpr std::uint64_t kShiftTag = 0x73686674ULL;   // misalignment shifts
constexpr std::uint64_t kNoiseTag = 0x6e6f6973ULL;   // per-trial noise seeds
}  // namespace

void StudyConfig::validate() const {
    if (frames < 1) throw std::invalid_argument("StudyConfig: frames must be >= 1");
    if (trials < 2)
        throw std::invalid_argument("StudyConfig: variance estimation needs trials >= 2");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("StudyConfig: negative noise sigma");
    if (epsilon < 0.0) throw std::invalid_argument("StudyConfig: negative epsilon");
    if (grid().empty()) throw std::invalid_argument("StudyConfig: empty p grid");
    if (se_groups < 2) throw std::invalid_argument("StudyConfig: se_groups must be >= 2");
    for (double p : grid())
        if (p < 0.0) throw std::invalid_argument("StudyConfig: p must be nonnegative");
}

std::vector<double> StudyConfig::grid() const {
    if (!p_grid.empty()) return p_grid;
    std::vector<double> g(51);
    for (int i = 0; i <= 50; ++i) g[i] = i;
    return g;
}

std::size_t StudyResult::argmin_mse() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < mse.size(); ++i)
        if (mse[i] < mse[best]) best = i;
    return best;
}

std::vector<BlurKernel> study_trial_kernels(const StudyConfig& config, int trial,
                                            double* shift_sum) {
    TremorParams tremor = config.tremor;
    tremor.t_exp = config.t_exp;
    std::vector<BlurKernel> kernels;
    kernels.reserve(config.frames);
    for (int i = 0; i < config.frames; ++i) {
        Rng rng(config.seed, kKernelTag, static_cast<std::uint64_t>(trial), i);
        BlurKernel k = simulate_kernel(tremor, rng);
        if (config.epsilon > 0.0) {
            Rng shift_rng(config.seed, kShiftTag, static_cast<std::uint64_t>(trial), i);
            const double dx = shift_rng.normal(0.0, config.epsilon);
            const double dy = shift_rng.normal(0.0, config.epsilon);
            if (shift_sum) *shift_sum += std::hypot(dx, dy);
            k = shift_kernel(k, dx, dy);
        }
        kernels.push_back(std::move(k));
    }
    return kernels;
}

std::uint64_t study_trial_noise_seed(const StudyConfig& config, int trial) {
    return config.seed ^ (kNoiseTag + 0x9e3779b97f4a7c15ULL *
                                          (static_cast<std::uint64_t>(trial) + 1));
}

namespace {

struct TrialEngine {
    const StudyConfig& cfg;
    const PlanarImage& gt;
    std::vector<double> grid;
    std::vector<Spectrum> gt_hat;  // per channel
    double conv_scale;

    TrialEngine(const StudyConfig& c, const PlanarImage& g)
        : cfg(c), gt(g), grid(c.grid()) {
        for (int ch = 0; ch < gt.channels; ++ch) gt_hat.push_back(fft2_plane(gt, ch));
        conv_scale = std::sqrt(static_cast<double>(gt.pixel_count()));
    }

    // Produces u_p for every p of one trial. out[p][c] are planes.
    void run_trial(int trial, std::vector<std::vector<Plane>>& out,
                   double* shift_sum) const {
        const int w = gt.width, h = gt.height, ch = gt.channels;
        const std::size_t n = gt.pixel_count();
        const int m = cfg.frames;

        const auto kernels = study_trial_kernels(cfg, trial, shift_sum);
        const std::uint64_t noise_seed = study_trial_noise_seed(cfg, trial);

        // spectra of v_i = u * k_i + n_i, built directly in the Fourier domain
        std::vector<std::vector<Spectrum>> v_hat(m);
        std::vector<double> log_mag(static_cast<std::size_t>(m) * n);
        for (int i = 0; i < m; ++i) {
            const Plane kplane = embed_for_convolution(kernels[i], w, h);
            const Spectrum k_hat = fft2(kplane, w, h);
            v_hat[i].reserve(ch);
            MagnitudeMap mag(w, h);
            for (int c = 0; c < ch; ++c) {
                Spectrum s(w, h);
                for (std::size_t b = 0; b < n; ++b)
                    s.bins[b] = k_hat.bins[b] * gt_hat[c].bins[b] * conv_scale;
                if (cfg.noise_sigma > 0.0) {
                    Rng noise(noise_seed, static_cast<std::uint64_t>(i), 0x6e6f, 0);
                    Plane nplane(n);
                    for (double& v : nplane) v = noise.normal(0.0, cfg.noise_sigma);
                    const Spectrum n_hat = fft2(nplane, w, h);
                    for (std::size_t b = 0; b < n; ++b) s.bins[b] += n_hat.bins[b];
                }
                for (std::size_t b = 0; b < n; ++b)
                    mag.values[b] += std::abs(s.bins[b]);
                v_hat[i].push_back(std::move(s));
            }
            for (double& v : mag.values) v /= ch;
            if (cfg.smoothing_scale > 0.0) {
                const double sigma = cfg.smoothing_scale * std::min(w, h) / cfg.ks;
                mag = gaussian_blur(mag, sigma);
            }
            for (std::size_t b = 0; b < n; ++b)
                log_mag[static_cast<std::size_t>(i) * n + b] =
                    std::log(std::max(mag.values[b], 1e-300));
        }

        std::vector<double> log_peak(n, -1e300);
        for (int i = 0; i < m; ++i)
            for (std::size_t b = 0; b < n; ++b)
                log_peak[b] = std::max(log_peak[b],
                                       log_mag[static_cast<std::size_t>(i) * n + b]);

        const double log_eps = std::log(kMagnitudeEps);
        Spectrum merged(w, h);
        for (std::size_t pi = 0; pi < grid.size(); ++pi) {
            const double p = grid[pi];
            for (int c = 0; c < ch; ++c) {
                for (std::size_t b = 0; b < n; ++b) merged.bins[b] = {0.0, 0.0};
                std::vector<double> wsum(n, 0.0);
                for (int i = 0; i < m; ++i) {
                    const double* lm = log_mag.data() + static_cast<std::size_t>(i) * n;
                    const auto& bins = v_hat[i][c].bins;
                    for (std::size_t b = 0; b < n; ++b) {
                        const double wt =
                            log_peak[b] <= log_eps
                                ? 1.0
                                : std::exp(p * (lm[b] - log_peak[b]));
                        merged.bins[b] += wt * bins[b];
                        wsum[b] += wt;
                    }
                }
                for (std::size_t b = 0; b < n; ++b)
                    merged.bins[b] /= std::max(wsum[b], kMagnitudeEps);
                out[pi][c] = ifft2(merged);
            }
        }
    }
};

}  // namespace

StudyResult run_study(const StudyConfig& config, const PlanarImage& ground_truth) {
    config.validate();
    const TrialEngine engine(config, ground_truth);
    const auto grid = config.grid();
    const std::size_t np = grid.size();
    const int ch = ground_truth.channels;
    const std::size_t n = ground_truth.pixel_count();
    const int trials = config.trials;
    const int groups = std::min(config.se_groups, trials);

    // per-group running sums of u and u^2, combined in group order afterwards
    // so results are independent of the worker count
    struct GroupAcc {
        std::vector<std::vector<Plane>> sum;    // [p][c]
        std::vector<std::vector<Plane>> sumsq;  // [p][c]
        double shift_sum = 0.0;
        int trial_count = 0;
    };
    std::vector<GroupAcc> acc(groups);
    for (auto& g : acc) {
        g.sum.assign(np, std::vector<Plane>(ch, Plane(n, 0.0)));
        g.sumsq.assign(np, std::vector<Plane>(ch, Plane(n, 0.0)));
    }

    parallel_for(0, groups, [&](std::int64_t g) {
        const int lo = static_cast<int>(g) * trials / groups;
        const int hi = static_cast<int>(g + 1) * trials / groups;
        std::vector<std::vector<Plane>> u_p(np, std::vector<Plane>(ch, Plane(n)));
        for (int t = lo; t < hi; ++t) {
            engine.run_trial(t, u_p, &acc[g].shift_sum);
            for (std::size_t pi = 0; pi < np; ++pi)
                for (int c = 0; c < ch; ++c) {
                    const Plane& u = u_p[pi][c];
                    Plane& s = acc[g].sum[pi][c];
                    Plane& q = acc[g].sumsq[pi][c];
                    for (std::size_t b = 0; b < n; ++b) {
                        s[b] += u[b];
                        q[b] += u[b] * u[b];
                    }
                }
            ++acc[g].trial_count;
        }
    });

    StudyResult result;
    result.config = config;
    result.p = grid;
    result.mse.assign(np, 0.0);
    result.bias2.assign(np, 0.0);
    result.variance.assign(np, 0.0);
    result.bias2_se.assign(np, 0.0);
    result.variance_se.assign(np, 0.0);

    const double samples = static_cast<double>(n) * ch;
    for (std::size_t pi = 0; pi < np; ++pi) {
        double bias2 = 0.0, var = 0.0, mse = 0.0;
        std::vector<double> g_bias2(groups, 0.0), g_var(groups, 0.0);
        for (int c = 0; c < ch; ++c) {
            const Plane& u = ground_truth.planes[c];
            for (std::size_t b = 0; b < n; ++b) {
                double s_all = 0.0, q_all = 0.0;
                for (int g = 0; g < groups; ++g) {
                    const double sg = acc[g].sum[pi][c][b];
                    const double qg = acc[g].sumsq[pi][c][b];
                    const double tg = acc[g].trial_count;
                    const double mg = sg / tg;
                    g_bias2[g] += (mg - u[b]) * (mg - u[b]);
                    g_var[g] += qg / tg - mg * mg;
                    s_all += sg;
                    q_all += qg;
                }
                const double mean = s_all / trials;
                bias2 += (mean - u[b]) * (mean - u[b]);
                var += q_all / trials - mean * mean;
                mse += q_all / trials - 2.0 * u[b] * mean + u[b] * u[b];
            }
        }
        result.bias2[pi] = bias2 / samples;
        result.variance[pi] = var / samples;
        result.mse[pi] = mse / samples;

        double b_mean = 0.0, v_mean = 0.0;
        for (int g = 0; g < groups; ++g) {
            g_bias2[g] /= samples;
            g_var[g] /= samples;
            b_mean += g_bias2[g];
            v_mean += g_var[g];
        }
        b_mean /= groups;
        v_mean /= groups;
        double b_ss = 0.0, v_ss = 0.0;
        for (int g = 0; g < groups; ++g) {
            b_ss += (g_bias2[g] - b_mean) * (g_bias2[g] - b_mean);
            v_ss += (g_var[g] - v_mean) * (g_var[g] - v_mean);
        }
        result.bias2_se[pi] = std::sqrt(b_ss / (groups - 1) / groups);
        result.variance_se[pi] = std::sqrt(v_ss / (groups - 1) / groups);
    }

    if (config.epsilon > 0.0) {
        double total = 0.0;
        for (const auto& g : acc) total += g.shift_sum;
        result.mean_shift_px = total / (static_cast<double>(trials) * config.frames);
    }
    return result;
}

std::vector<StudyResult> run_misalignment_study(const StudyConfig& config,
                                                const std::vector<double>& epsilons,
                                                const PlanarImage& ground_truth) {
    if (epsilons.empty())
        throw std::invalid_argument("run_misalignment_study: empty epsilon grid");
    std::vector<StudyResult> results;
    results.reserve(epsilons.size());
    for (double eps : epsilons) {
        StudyConfig cfg = config;
        cfg.epsilon = eps;
        results.push_back(run_study(cfg, ground_truth));
    }
    return results;
}

std::string study_csv(const std::vector<StudyResult>& results) {
    std::string out = "p,epsilon,T_exp,M,s,trials,mse,bias2,variance\n";
    char row[512];
    for (const auto& r : results) {
        for (std::size_t i = 0; i < r.p.size(); ++i) {
            std::snprintf(row, sizeof(row),
                          "%.17g,%.17g,%.17g,%d,%.17g,%d,%.17g,%.17g,%.17g\n",
                          r.p[i], r.config.epsilon, r.config.t_exp, r.config.frames,
                          r.config.noise_sigma, r.config.trials, r.mse[i], r.bias2[i],
                          r.variance[i]);
            out += row;
        }
    }
    return out;
}

void write_study_csv(const std::string& path,
                     const std::vector<StudyResult>& results) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    f << study_csv(results);
}

}  // namespace fba
