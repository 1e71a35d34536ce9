#pragma once

#include <complex>
#include <memory>
#include <span>

namespace specshape {

/// Unnormalised complex DFT of fixed size backed by an FFTW plan.
/// Forward: X_k = sum_m x_m e^{-j 2 pi k m / n}; Inverse uses e^{+j...} and no 1/n.
class Fft {
public:
    enum class Direction { Forward, Inverse };

    Fft(int n, Direction dir);
    ~Fft();
    Fft(Fft&&) noexcept;
    Fft& operator=(Fft&&) noexcept;
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    int size() const { return n_; }
    /// in and out must both hold size() values; they may alias.
    void execute(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

private:
    struct Plan;
    int n_ = 0;
    std::unique_ptr<Plan> plan_;
};

}  // namespace specshape
