#include <doctest.h>

#include <cmath>

#include "fba/gaussian.hpp"
#include "fba/sharpen.hpp"
#include "test_support.hpp"

using namespace fba;

TEST_CASE("denoiser none is the identity") {
    const PlanarImage img = test::random_image(32, 32, 1, 1);
    SharpenConfig cfg;
    cfg.denoiser = Denoiser::None;
    CHECK(max_abs_diff(denoise(img, cfg), img) == 0.0);
}

TEST_CASE("constant images pass through every denoiser") {
    const PlanarImage img = test::constant_image(48, 40, 1, 0.42);
    for (auto d : {Denoiser::NlMeans, Denoiser::DctThreshold}) {
        SharpenConfig cfg;
        cfg.denoiser = d;
        CHECK(max_abs_diff(denoise(img, cfg), img) < 1e-6);
    }
}

TEST_CASE("denoisers reduce the error of a noisy image") {
    const PlanarImage clean = [&] {
        PlanarImage img = test::constant_image(64, 64, 1, 0.0);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                img.at(0, y, x) = 0.3 + 0.4 * ((x / 16 + y / 16) % 2);
        return gaussian_blur(img, 1.0, Boundary::Mirror);
    }();

    PlanarImage noisy = clean;
    Rng rng(17, 0x6e6f, 0, 0);
    for (double& v : noisy.planes[0]) v += rng.normal(0.0, 0.04);
    const double noisy_rmse = rmse(noisy, clean);

    for (auto d : {Denoiser::NlMeans, Denoiser::DctThreshold}) {
        SharpenConfig cfg;
        cfg.denoiser = d;
        const double cleaned_rmse = rmse(denoise(noisy, cfg), clean);
        CHECK(cleaned_rmse < noisy_rmse);
    }
}

TEST_CASE("noise sigma estimate tracks the injected noise") {
    PlanarImage img = test::constant_image(96, 96, 1, 0.5);
    Rng rng(3, 0x6573, 0, 0);
    for (double& v : img.planes[0]) v += rng.normal(0.0, 0.05);
    CHECK(estimate_noise_sigma(img) == doctest::Approx(0.05).epsilon(0.15));
}

TEST_CASE("sharpening keeps constants fixed") {
    const PlanarImage img = test::constant_image(32, 32, 3, 0.61);
    SharpenConfig cfg;  // default NL-means path
    CHECK(max_abs_diff(noise_aware_sharpen(img, cfg), img) < 1e-6);
}

TEST_CASE("denoiser-free sharpening equals the closed form") {
    const PlanarImage img = test::random_image(40, 32, 1, 9);
    SharpenConfig cfg;
    cfg.denoiser = Denoiser::None;
    cfg.delta = 0.0;
    cfg.rho = 2.0;
    const PlanarImage out = noise_aware_sharpen(img, cfg);

    const PlanarImage blurred = gaussian_blur(img, 2.0, Boundary::Mirror);
    PlanarImage expect(img.width, img.height, 1);
    for (std::size_t i = 0; i < expect.planes[0].size(); ++i)
        expect.planes[0][i] = 2.0 * img.planes[0][i] - blurred.planes[0][i];
    CHECK(max_abs_diff(out, expect) < 1e-9);

    // with denoiser none, delta does not matter: the residual term vanishes
    cfg.delta = 0.7;
    CHECK(max_abs_diff(noise_aware_sharpen(img, cfg), expect) < 1e-12);
}

TEST_CASE("sharpening strengthens a step edge") {
    PlanarImage img = test::constant_image(64, 64, 1, 0.0);
    for (int y = 0; y < 64; ++y)
        for (int x = 32; x < 64; ++x) img.at(0, y, x) = 1.0;
    img = gaussian_blur(img, 1.5, Boundary::Mirror);

    SharpenConfig cfg;
    cfg.denoiser = Denoiser::None;
    cfg.delta = 0.4;
    cfg.rho = 2.0;
    const PlanarImage out = noise_aware_sharpen(img, cfg);

    const double grad_in = std::abs(img.at(0, 32, 32) - img.at(0, 32, 31));
    const double grad_out = std::abs(out.at(0, 32, 32) - out.at(0, 32, 31));
    CHECK(grad_out > grad_in);
}

TEST_CASE("interior mean is preserved by the unsharp mask") {
    const PlanarImage img = test::random_image(64, 64, 1, 31);
    SharpenConfig cfg;
    cfg.denoiser = Denoiser::None;
    const PlanarImage out = noise_aware_sharpen(img, cfg);
    double mean_in = 0.0, mean_out = 0.0;
    int count = 0;
    for (int y = 12; y < 52; ++y)
        for (int x = 12; x < 52; ++x) {
            mean_in += img.at(0, y, x);
            mean_out += out.at(0, y, x);
            ++count;
        }
    CHECK(mean_out / count == doctest::Approx(mean_in / count).epsilon(1e-3));
}

TEST_CASE("config validation") {
    SharpenConfig cfg;
    cfg.rho = 0.2;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.rho = 2.0;
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
