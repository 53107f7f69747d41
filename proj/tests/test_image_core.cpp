#include <doctest.h>

#include <cmath>
#include <complex>

#include "fba/fft.hpp"
#include "fba/gaussian.hpp"
#include "fba/image_io.hpp"
#include "test_support.hpp"

using namespace fba;

TEST_CASE("fft2 of an all-zero plane is zero") {
    Plane zeros(64, 0.0);
    const Spectrum s = fft2(zeros, 8, 8);
    for (const auto& b : s.bins) CHECK(std::abs(b) == 0.0);
}

TEST_CASE("fft2 of a constant plane concentrates in the DC bin") {
    const double c = 0.37;
    Plane plane(64, c);
    const Spectrum s = fft2(plane, 8, 8);
    // unitary scaling: DC = c * N / sqrt(N)
    CHECK(std::abs(s.at(0, 0) - std::complex<double>(c * 8.0, 0.0)) < 1e-12);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            if (x || y) CHECK(std::abs(s.at(y, x)) < 1e-12);
}

TEST_CASE("fft round trip is the identity, odd and even sizes") {
    for (int size : {7, 8, 15, 16, 33, 128}) {
        const Plane p = test::random_plane(size, size, 42 + size);
        double resid = 0.0;
        const Plane back = ifft2(fft2(p, size, size), &resid);
        CHECK(test::plane_max_diff(p, back) < 1e-9);
    }
}

TEST_CASE("fft round trip reproduces a Dirac") {
    Plane dirac(16 * 16, 0.0);
    dirac[5 * 16 + 9] = 1.0;
    const Plane back = ifft2(fft2(dirac, 16, 16));
    CHECK(test::plane_max_diff(dirac, back) < 1e-9);
}

TEST_CASE("Parseval under the unitary convention") {
    const Plane p = test::random_plane(24, 17, 7);
    const Spectrum s = fft2(p, 24, 17);
    double spatial = 0.0, spectral = 0.0;
    for (double v : p) spatial += v * v;
    for (const auto& b : s.bins) spectral += std::norm(b);
    CHECK(spatial == doctest::Approx(spectral).epsilon(1e-6));
}

TEST_CASE("ifft2 of a zero / DC-only spectrum") {
    Spectrum zero(9, 9);
    for (double v : ifft2(zero)) CHECK(v == 0.0);

    Spectrum dc(9, 9);
    dc.at(0, 0) = {9.0 * 0.5, 0.0};  // constant 0.5 after 1/sqrt(81)
    for (double v : ifft2(dc)) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fft2 rejects zero dimensions") {
    Plane p;
    CHECK_THROWS_AS(fft2(p, 0, 4), std::invalid_argument);
}

TEST_CASE("gaussian_blur keeps constants and sigma=0 is the identity") {
    MagnitudeMap map(12, 10);
    std::fill(map.values.begin(), map.values.end(), 3.25);
    const MagnitudeMap blurred = gaussian_blur(map, 2.7);
    for (double v : blurred.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-12));

    const Plane p = test::random_plane(16, 16, 3);
    CHECK(test::plane_max_diff(p, gaussian_blur(p, 16, 16, 0.0, Boundary::Mirror)) ==
          0.0);
}

TEST_CASE("gaussian_blur of a Dirac matches the sampled Gaussian") {
    const int n = 33;
    Plane dirac(static_cast<std::size_t>(n) * n, 0.0);
    dirac[16 * n + 16] = 1.0;
    const double sigma = 2.0;
    const Plane blurred = gaussian_blur(dirac, n, n, sigma, Boundary::Periodic);

    // direct-summation oracle: separable normalized taps
    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        taps[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += taps[i + radius];
    }
    for (double& t : taps) t /= sum;

    double mass = 0.0;
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const int dy = y - 16, dx = x - 16;
            const double expect =
                (std::abs(dy) <= radius && std::abs(dx) <= radius)
                    ? taps[dy + radius] * taps[dx + radius]
                    : 0.0;
            CHECK(blurred[static_cast<std::size_t>(y) * n + x] ==
                  doctest::Approx(expect).epsilon(1e-9));
            mass += blurred[static_cast<std::size_t>(y) * n + x];
        }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gaussian_blur preserves mass of nonnegative input under periodic borders") {
    const Plane p = test::random_plane(21, 14, 11);
    const Plane blurred = gaussian_blur(p, 21, 14, 3.3, Boundary::Periodic);
    double before = 0.0, after = 0.0;
    for (double v : p) before += v;
    for (double v : blurred) after += v;
    CHECK(after == doctest::Approx(before).epsilon(1e-6));
}

TEST_CASE("gaussian_blur rejects negative sigma") {
    const Plane p = test::random_plane(8, 8, 1);
    CHECK_THROWS_AS(gaussian_blur(p, 8, 8, -1.0, Boundary::Mirror),
                    std::invalid_argument);
}

TEST_CASE("16-bit PNG round trip stays within one quantization step") {
    const PlanarImage img = test::random_image(23, 17, 3, 99);
    const std::string path = test::temp_dir() + "/roundtrip16.png";
    write_image(img, path, 16);
    const PlanarImage back = read_image(path);
    REQUIRE(back.same_shape(img));
    CHECK(max_abs_diff(img, back) <= 1.0 / 65535.0 + 1e-12);
}

TEST_CASE("PFM round trip is bit-exact at float precision") {
    PlanarImage img = test::random_image(19, 11, 1, 5);
    // quantize through float once; the file format stores float32
    for (auto& p : img.planes)
        for (double& v : p) v = static_cast<float>(v);
    const std::string path = test::temp_dir() + "/roundtrip.pfm";
    write_image(img, path);
    const PlanarImage back = read_image(path);
    REQUIRE(back.same_shape(img));
    CHECK(max_abs_diff(img, back) == 0.0);
}

TEST_CASE("8-bit gray PNG reads back as one channel") {
    PlanarImage img = test::constant_image(12, 9, 1, 0.5);
    const std::string path = test::temp_dir() + "/gray8.png";
    write_image(img, path, 8);
    const PlanarImage back = read_image(path);
    CHECK(back.channels == 1);
    CHECK(back.width == 12);
    CHECK(back.height == 9);
}

TEST_CASE("reading a missing file names the path") {
    const std::string path = test::temp_dir() + "/does_not_exist.png";
    try {
        read_image(path);
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
}

TEST_CASE("PNG write clamps out-of-range values") {
    PlanarImage img = test::constant_image(8, 8, 1, 0.5);
    img.at(0, 0, 0) = -0.25;
    img.at(0, 0, 1) = 1.75;
    const std::string path = test::temp_dir() + "/clamped.png";
    write_image(img, path, 16);
    const PlanarImage back = read_image(path);
    CHECK(back.at(0, 0, 0) == 0.0);
    CHECK(back.at(0, 0, 1) == 1.0);
}
