#include "fba/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>

namespace fba {

namespace {

// FFTW plan creation is not thread-safe; execution via the new-array API is.
// Plans are cached per (height, width, sign) and created with FFTW_UNALIGNED
// so they can run on any caller buffer.
class PlanCache {
public:
    fftw_plan get(int height, int width, int sign, bool in_place = false) {
        std::lock_guard<std::mutex> lock(mutex_);
        const auto key = std::make_tuple(height, width, sign, in_place);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::vector<fftw_complex> a(static_cast<std::size_t>(width) * height);
        std::vector<fftw_complex> b(in_place ? 0 : a.size());
        fftw_plan plan =
            fftw_plan_dft_2d(height, width, a.data(), in_place ? a.data() : b.data(),
                             sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

private:
    std::mutex mutex_;
    std::map<std::tuple<int, int, int, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

Spectrum fft2(const Plane& plane, int width, int height) {
    if (width < 1 || height < 1)
        throw std::invalid_argument("fft2: dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    if (plane.size() != n) throw std::invalid_argument("fft2: plane size mismatch");

    std::vector<std::complex<double>> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = {plane[i], 0.0};

    Spectrum out(width, height);
    fftw_plan plan = cache().get(height, width, FFTW_FORWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.bins.data()));

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& b : out.bins) b *= scale;
    return out;
}

Spectrum fft2_plane(const PlanarImage& img, int channel) {
    return fft2(img.planes[channel], img.width, img.height);
}

Plane ifft2(const Spectrum& spectrum, double* max_abs_imag) {
    if (spectrum.width < 1 || spectrum.height < 1)
        throw std::invalid_argument("ifft2: dimensions must be positive");
    const std::size_t n = spectrum.bins.size();

    std::vector<std::complex<double>> out(n);
    std::vector<std::complex<double>> in = spectrum.bins;
    fftw_plan plan = cache().get(spectrum.height, spectrum.width, FFTW_BACKWARD);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Plane result(n);
    double imag_peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        result[i] = out[i].real() * scale;
        imag_peak = std::max(imag_peak, std::abs(out[i].imag()) * scale);
    }
    if (max_abs_imag) *max_abs_imag = imag_peak;
    return result;
}

MagnitudeMap magnitude(const Spectrum& spectrum) {
    MagnitudeMap map(spectrum.width, spectrum.height);
    for (std::size_t i = 0; i < spectrum.bins.size(); ++i)
        map.values[i] = std::abs(spectrum.bins[i]);
    return map;
}

void fft2_inplace(std::vector<std::complex<double>>& buffer, int width,
                  int height, bool inverse) {
    if (buffer.size() != static_cast<std::size_t>(width) * height)
        throw std::invalid_argument("fft2_inplace: buffer size mismatch");
    fftw_plan plan = cache().get(height, width,
                                 inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                 /*in_place=*/true);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buffer.data()),
                     reinterpret_cast<fftw_complex*>(buffer.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(buffer.size()));
    for (auto& v : buffer) v *= scale;
}

void fft1(std::vector<std::complex<double>>& data, bool inverse) {
    if (data.empty()) return;
    fftw_plan plan = cache().get(1, static_cast<int>(data.size()),
                                 inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                 /*in_place=*/true);
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
    const double scale = 1.0 / std::sqrt(static_cast<double>(data.size()));
    for (auto& v : data) v *= scale;
}

}  // namespace fba
