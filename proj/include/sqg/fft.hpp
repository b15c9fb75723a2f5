#pragma once

// FFTW-backed 2D real transforms with a process-wide plan cache.
//
// Plans are created once per grid size under a mutex with FFTW_ESTIMATE (the
// chosen algorithm is deterministic) and FFTW_UNALIGNED, then executed through
// the new-array interface, which FFTW documents as safe to call concurrently.

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sqg/field.hpp"

namespace sqg::detail {

class FftPlans {
public:
    explicit FftPlans(int n) {
        std::vector<double> real(static_cast<std::size_t>(n) * n);
        std::vector<Complex> spec(static_cast<std::size_t>(n) * (n / 2 + 1));
        auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        forward_ = fftw_plan_dft_r2c_2d(n, n, real.data(), cplx, flags);
        backward_ = fftw_plan_dft_c2r_2d(n, n, cplx, real.data(), flags);
        if (!forward_ || !backward_) throw Error("fftw: plan creation failed for n=" + std::to_string(n));
    }
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    ~FftPlans() {
        std::lock_guard lock(mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void forward(double* in, Complex* out) const {
        fftw_execute_dft_r2c(forward_, in, reinterpret_cast<fftw_complex*>(out));
    }
    // Destroys the contents of `in`.
    void backward(Complex* in, double* out) const {
        fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in), out);
    }

    /// FFTW's planner is not thread-safe; every planner call goes through this.
    static std::mutex& mutex() {
        static std::mutex m;
        return m;
    }

    static const FftPlans& for_size(int n) {
        auto& m = mutex();  // constructed before the cache, so it outlives it
        static std::map<int, std::unique_ptr<FftPlans>> cache;
        std::lock_guard lock(m);
        auto& slot = cache[n];
        if (!slot) slot = std::make_unique<FftPlans>(n);
        return *slot;
    }

private:
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace sqg::detail
