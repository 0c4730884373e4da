#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>

#include "satphase/error.hpp"

namespace satphase {

/// Square 2-D complex FFT backed by FFTW. Both directions are unnormalised;
/// callers scale explicitly.
class Fft2 {
public:
    explicit Fft2(std::size_t n) : n_(n) {
        // FFTW's planner is not re-entrant.
        std::scoped_lock lock(planner_mutex());
        auto* buf = fftw_alloc_complex(n * n);
        const int dim = static_cast<int>(n);
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_2d(dim, dim, buf, buf, FFTW_FORWARD, flags);
        backward_ = fftw_plan_dft_2d(dim, dim, buf, buf, FFTW_BACKWARD, flags);
        fftw_free(buf);
        if (!forward_ || !backward_) throw NumericalError("Fft2: FFTW planning failed");
    }

    Fft2(const Fft2&) = delete;
    Fft2& operator=(const Fft2&) = delete;

    ~Fft2() {
        std::scoped_lock lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    std::size_t size() const noexcept { return n_; }

    void forward(std::span<std::complex<double>> data) const { run(forward_, data); }
    void backward(std::span<std::complex<double>> data) const { run(backward_, data); }

private:
    static std::mutex& planner_mutex() {
        static std::mutex m;
        return m;
    }

    void run(fftw_plan plan, std::span<std::complex<double>> data) const {
        if (data.size() != n_ * n_) throw ShapeError("Fft2: buffer size mismatch");
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, p, p);
    }

    std::size_t n_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

/// Frequency [cycles/m] of FFT bin k on an n-point grid of spacing `pitch`.
inline double fft_frequency(std::size_t k, std::size_t n, double pitch) noexcept {
    const auto kk = static_cast<long long>(k);
    const auto nn = static_cast<long long>(n);
    const long long signed_k = kk < (nn + 1) / 2 ? kk : kk - nn;
    return static_cast<double>(signed_k) / (static_cast<double>(n) * pitch);
}

}  // namespace satphase
