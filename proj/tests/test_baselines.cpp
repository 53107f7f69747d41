#include <doctest.h>

#include <cmath>

#include "fba/baselines.hpp"
#include "fba/fba.hpp"
#include "fba/gaussian.hpp"
#include "fba/shake.hpp"
#include "test_support.hpp"

using namespace fba;

TEST_CASE("align_and_average basics") {
    const PlanarImage frame = test::random_image(16, 16, 1, 2);
    CHECK(max_abs_diff(align_and_average({frame, frame, frame}), frame) < 1e-15);

    const PlanarImage zeros = test::constant_image(8, 8, 1, 0.0);
    const PlanarImage ones = test::constant_image(8, 8, 1, 1.0);
    const PlanarImage mean = align_and_average({zeros, ones});
    for (double v : mean.planes[0]) CHECK(v == 0.5);

    CHECK_THROWS_AS(align_and_average({}), std::invalid_argument);
}

TEST_CASE("dirichlet energy of a constant frame is zero") {
    const auto e = dirichlet_energy(test::constant_image(64, 64, 1, 0.7));
    CHECK(e.total == 0.0);
    for (double v : e.map) CHECK(v == 0.0);
}

TEST_CASE("unit-slope ramp integrates to block area") {
    const int n = 256;
    PlanarImage ramp(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) ramp.at(0, y, x) = static_cast<double>(x);
    const auto e = dirichlet_energy(ramp, 100);
    // interior pixel whose 100x100 block avoids the mirrored border columns
    CHECK(e.map[static_cast<std::size_t>(128) * n + 128] ==
          doctest::Approx(10000.0).epsilon(1e-12));
}

TEST_CASE("blur strictly lowers the total Dirichlet energy") {
    const PlanarImage sharp = synthetic_scene(96, 96, 13);
    const PlanarImage soft = gaussian_blur(sharp, 2.0, Boundary::Mirror);
    CHECK(dirichlet_energy(sharp).total > dirichlet_energy(soft).total);
}

TEST_CASE("lucky frame average selection") {
    const PlanarImage sharp = synthetic_scene(96, 96, 29);
    const PlanarImage soft = gaussian_blur(sharp, 2.5, Boundary::Mirror);
    const std::vector<PlanarImage> burst = {soft, sharp};

    // K = 1 picks the sharp frame
    CHECK(max_abs_diff(lucky_frame_average(burst, 1), sharp) == 0.0);
    // K = M is the plain average
    CHECK(max_abs_diff(lucky_frame_average(burst, 2), align_and_average(burst)) ==
          0.0);
    // identical frames collapse to the frame
    CHECK(max_abs_diff(lucky_frame_average({sharp, sharp}, 2), sharp) == 0.0);

    CHECK_THROWS_AS(lucky_frame_average(burst, 0), std::invalid_argument);
    CHECK_THROWS_AS(lucky_frame_average(burst, 3), std::invalid_argument);
}

TEST_CASE("sharpness-selectivity weighting") {
    // constant burst takes the fallback path
    const PlanarImage flat = test::constant_image(32, 32, 1, 0.3);
    CHECK(max_abs_diff(sharpness_selectivity_average({flat, flat}), flat) < 1e-12);

    // identical frames collapse to the frame
    const PlanarImage scene = synthetic_scene(64, 64, 31);
    CHECK(max_abs_diff(sharpness_selectivity_average({scene, scene}), scene) < 1e-12);
}

TEST_CASE("sharp frames get larger sharpness weights at edges") {
    // a cross of two step edges blurred along orthogonal directions: the
    // frame whose blur runs parallel to an edge keeps that edge sharp
    const int n = 64;
    PlanarImage cross(n, n, 1);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
            cross.at(0, y, x) = (y >= n / 2 ? 0.5 : 0.0) + (x >= n / 2 ? 0.5 : 0.0);

    BlurKernel horiz(21), vert(21);
    for (int i = -8; i <= 8; ++i) {
        horiz.at(10, 10 + i) = 1.0;
        vert.at(10 + i, 10) = 1.0;
    }
    normalize_mass(horiz);
    normalize_mass(vert);
    const auto burst = synthesize_burst(cross, {horiz, vert}, 0.0, 3);

    // Laplacian-ordering oracle at a pixel on the horizontal edge, away from
    // the vertical one: only the vertically blurred frame loses it
    const int ey = n / 2, ex = 12;
    auto lap = [&](const PlanarImage& f) {
        return std::abs(f.at(0, ey - 1, ex) + f.at(0, ey + 1, ex) +
                        f.at(0, ey, ex - 1) + f.at(0, ey, ex + 1) -
                        4.0 * f.at(0, ey, ex));
    };
    CHECK(lap(burst[0]) > lap(burst[1]));

    // so the fusion at that pixel must lean toward the horizontally blurred
    // frame relative to the plain mean
    const PlanarImage fused = sharpness_selectivity_average(burst, 50.0);
    const PlanarImage mean = align_and_average(burst);
    CHECK(std::abs(fused.at(0, ey, ex) - burst[0].at(0, ey, ex)) <
          std::abs(mean.at(0, ey, ex) - burst[0].at(0, ey, ex)));
}

TEST_CASE("frequency percentile fusion limits") {
    std::vector<PlanarImage> frames;
    for (int i = 0; i < 4; ++i) frames.push_back(test::random_image(16, 16, 1, 70 + i));

    // all frames selected -> plain average
    CHECK(max_abs_diff(frequency_percentile_fusion(frames, 1.0),
                       align_and_average(frames)) < 1e-9);

    // identical frames -> that frame for any fraction
    const std::vector<PlanarImage> same(3, frames[0]);
    CHECK(max_abs_diff(frequency_percentile_fusion(same, 0.4), frames[0]) < 1e-9);
}

TEST_CASE("fraction 1/2 of two frames equals per-frequency max selection") {
    std::vector<PlanarImage> frames = {test::random_image(16, 16, 1, 80),
                                       test::random_image(16, 16, 1, 81)};
    FbaConfig pooled;
    pooled.max_pool = true;
    pooled.smoothing_scale = 0.0;  // selection uses raw magnitudes
    const PlanarImage lucky = frequency_percentile_fusion(frames, 0.5);
    CHECK(max_abs_diff(lucky, fba_merge(frames, pooled)) < 1e-9);
}

TEST_CASE("baselines are permutation invariant") {
    std::vector<PlanarImage> frames;
    for (int i = 0; i < 4; ++i)
        frames.push_back(synthetic_scene(48, 48, 200 + i));
    std::vector<PlanarImage> shuffled = {frames[2], frames[0], frames[3], frames[1]};

    CHECK(max_abs_diff(align_and_average(frames), align_and_average(shuffled)) <
          1e-12);
    CHECK(max_abs_diff(lucky_frame_average(frames, 2),
                       lucky_frame_average(shuffled, 2)) < 1e-12);
    CHECK(max_abs_diff(sharpness_selectivity_average(frames),
                       sharpness_selectivity_average(shuffled)) < 1e-12);
    CHECK(max_abs_diff(frequency_percentile_fusion(frames, 0.5),
                       frequency_percentile_fusion(shuffled, 0.5)) < 1e-12);
}

TEST_CASE("every baseline reproduces a burst of copies") {
    const PlanarImage frame = synthetic_scene(48, 48, 77);
    const std::vector<PlanarImage> burst(5, frame);
    CHECK(max_abs_diff(align_and_average(burst), frame) < 1e-12);
    CHECK(max_abs_diff(lucky_frame_average(burst, 3), frame) < 1e-12);
    CHECK(max_abs_diff(sharpness_selectivity_average(burst), frame) < 1e-12);
    CHECK(max_abs_diff(frequency_percentile_fusion(burst, 0.2), frame) < 1e-9);
}
