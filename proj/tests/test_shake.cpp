#include <doctest.h>

#include <cmath>

#include "fba/fft.hpp"
#include "fba/shake.hpp"
#include "test_support.hpp"

using namespace fba;

TEST_CASE("vanishing exposure collapses to a centered Dirac") {
    TremorParams params;
    params.t_exp = 1e-6;
    Rng rng(1);
    const BlurKernel k = simulate_kernel(params, rng);

    BlurKernel dirac(k.size);
    dirac.at(k.center(), k.center()) = 1.0;
    double tv = 0.0;
    for (std::size_t i = 0; i < k.grid.size(); ++i)
        tv += std::abs(k.grid[i] - dirac.grid[i]);
    CHECK(tv / 2.0 < 1e-3);
}

TEST_CASE("simulated kernels are mass one and centered") {
    TremorParams params;
    for (int i = 0; i < 20; ++i) {
        Rng rng(100 + i);
        const BlurKernel k = simulate_kernel(params, rng);
        CHECK(kernel_mass(k) == doctest::Approx(1.0).epsilon(1e-12));
        const auto mu = kernel_first_moment(k);
        CHECK(std::hypot(mu[0], mu[1]) <= 0.05);
        for (double v : k.grid) CHECK(v >= 0.0);
    }
}

TEST_CASE("mean kernel extent grows with exposure") {
    const double exposures[] = {0.1, 0.2, 1.0 / 3.0, 0.5, 2.0 / 3.0};
    double previous = -1.0;
    for (double t : exposures) {
        TremorParams params;
        params.t_exp = t;
        double mean_extent = 0.0;
        const int draws = 200;
        for (int i = 0; i < draws; ++i) {
            Rng rng(5000 + i);
            mean_extent += kernel_extent(simulate_kernel(params, rng));
        }
        mean_extent /= draws;
        CHECK(mean_extent > previous);
        previous = mean_extent;
    }
}

TEST_CASE("default amplitude yields roughly 10 px extent at t_exp=1/3") {
    TremorParams params;
    double mean_extent = 0.0;
    const int draws = 200;
    for (int i = 0; i < draws; ++i) {
        Rng rng(9000 + i);
        mean_extent += kernel_extent(simulate_kernel(params, rng));
    }
    mean_extent /= draws;
    CHECK(mean_extent > 7.0);
    CHECK(mean_extent < 13.0);
}

TEST_CASE("simulated kernels satisfy the no-amplification bound") {
    TremorParams params;
    for (int i = 0; i < 30; ++i) {
        Rng rng(333 + i);
        const BlurKernel k = simulate_kernel(params, rng);
        const Spectrum s = fft2(k.grid, k.size, k.size);
        const double norm = std::sqrt(static_cast<double>(k.size) * k.size);
        for (const auto& b : s.bins) CHECK(std::abs(b) * norm <= 1.0 + 1e-9);
    }
}

TEST_CASE("trajectories are anisotropic") {
    // hand-shake traces are mostly one-dimensional; the second-moment
    // eigenvalue ratio reflects that
    TremorParams params;
    std::vector<double> ratios;
    for (int i = 0; i < 500; ++i) {
        Rng rng(7100 + i);
        const BlurKernel k = simulate_kernel(params, rng);
        const auto s = kernel_second_moment(k);
        const double tr = s[0] + s[2];
        const double det = s[0] * s[2] - s[1] * s[1];
        const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
        const double lmax = tr / 2.0 + disc;
        const double lmin = std::max(tr / 2.0 - disc, 1e-12);
        ratios.push_back(lmax / lmin);
    }
    std::sort(ratios.begin(), ratios.end());
    CHECK(ratios[ratios.size() / 2] > 3.0);
}

TEST_CASE("synthesize_burst with Dirac kernels and no noise is exact") {
    const PlanarImage truth = synthetic_scene(48, 48, 3);
    BlurKernel dirac(41);
    dirac.at(20, 20) = 1.0;
    const auto burst = synthesize_burst(truth, {dirac, dirac, dirac}, 0.0, 7);
    for (const auto& f : burst) CHECK(rmse(f, truth) < 1e-9);
}

TEST_CASE("synthesized noise has the requested strength") {
    const PlanarImage truth = synthetic_scene(96, 96, 5);
    BlurKernel dirac(41);
    dirac.at(20, 20) = 1.0;
    const auto burst = synthesize_burst(truth, {dirac, dirac}, 0.04, 11);
    for (const auto& f : burst) {
        double acc = 0.0;
        for (std::size_t i = 0; i < f.planes[0].size(); ++i) {
            const double d = f.planes[0][i] - truth.planes[0][i];
            acc += d * d;
        }
        const double sd = std::sqrt(acc / f.planes[0].size());
        CHECK(sd == doctest::Approx(0.04).epsilon(0.05));
    }
}

TEST_CASE("synthesize_burst is deterministic per seed") {
    const PlanarImage truth = synthetic_scene(32, 32, 1);
    BlurKernel dirac(11);
    dirac.at(5, 5) = 1.0;
    const auto a = synthesize_burst(truth, {dirac, dirac}, 0.02, 99);
    const auto b = synthesize_burst(truth, {dirac, dirac}, 0.02, 99);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i], b[i]) == 0.0);
}
