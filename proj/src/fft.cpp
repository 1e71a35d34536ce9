#include "specshape/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <vector>

#include "specshape/errors.hpp"

namespace specshape {

namespace {

// The FFTW planner is not thread-safe; execution with new-array functions is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

struct Fft::Plan {
    fftw_plan plan = nullptr;
    ~Plan() {
        if (plan) {
            std::lock_guard lock(planner_mutex());
            fftw_destroy_plan(plan);
        }
    }
};

Fft::Fft(int n, Direction dir) : n_(n), plan_(std::make_unique<Plan>()) {
    if (n <= 0) throw ValidationError("fft: size must be positive");
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(planner_mutex());
    plan_->plan = fftw_plan_dft_1d(n, buf, buf, dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan_->plan) throw NumericalError("fft: FFTW could not create a plan");
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    if (static_cast<int>(in.size()) != n_ || static_cast<int>(out.size()) != n_) {
        throw ValidationError("fft: buffer length does not match the transform size");
    }
    // The plan is in-place, so distinct buffers are handled by copying into out first.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (src != dst) {
        std::copy(in.begin(), in.end(), out.begin());
        src = dst;
    }
    fftw_execute_dft(plan_->plan, src, dst);
}

}  // namespace specshape
