#ifndef CHAOKEY_DETAIL_FFT_HPP
#define CHAOKEY_DETAIL_FFT_HPP

#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include <fftw3.h>

namespace chaokey::detail {

// FFTW's planner is not thread-safe; plan creation/destruction is serialized
// here. fftw_execute on distinct plans may run concurrently.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Forward DFT of a real sequence, full complex spectrum (FFTW_ESTIMATE, so
/// results are reproducible run to run).
inline std::vector<std::complex<double>> fft_forward(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> in(n), out(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = x[i];

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(in.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

/// Inverse DFT, real part only, scaled by 1/n (so ifft(fft(x)) == x).
inline std::vector<double> fft_inverse_real(std::vector<std::complex<double>> spectrum) {
    const std::size_t n = spectrum.size();
    std::vector<std::complex<double>> out(n);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(n),
                                reinterpret_cast<fftw_complex*>(spectrum.data()),
                                reinterpret_cast<fftw_complex*>(out.data()),
                                FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    std::vector<double> result(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) result[i] = out[i].real() * inv;
    return result;
}

} // namespace chaokey::detail

#endif
