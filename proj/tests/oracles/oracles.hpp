// Reference implementations used only by the tests. Each is deliberately naive and shares no
// code with the library beyond plain data types.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double midpoint(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = 0.0;
    for (int i = 0; i < panels; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

/// Direct O(n^2) DFT with the given exponent sign and no scaling.
inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, int sign) {
    const auto n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc;
        for (std::size_t m = 0; m < n; ++m) {
            const double ph = sign * 2.0 * std::numbers::pi * static_cast<double>((k * m) % n) / static_cast<double>(n);
            acc += x[m] * std::polar(1.0, ph);
        }
        out[k] = acc;
    }
    return out;
}

/// Exhaustive water-filling: tries every subset of the eligible gammas, keeps the feasible
/// ones (all powers positive) and returns the powers of the highest-capacity subset.
inline std::vector<double> brute_force_waterfill(const std::vector<double>& gamma2, double total_power) {
    const std::size_t n = gamma2.size();
    double best = -1.0;
    std::vector<double> best_p(n, 0.0);
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        double gsum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) {
                gsum += gamma2[i];
                ++count;
            }
        }
        const double level = (total_power + gsum) / count;
        std::vector<double> p(n, 0.0);
        bool feasible = true;
        double cap = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            p[i] = level - gamma2[i];
            if (p[i] <= 0.0) feasible = false;
            cap += std::log2(1.0 + p[i] / gamma2[i]);
        }
        if (feasible && cap > best) {
            best = cap;
            best_p = p;
        }
    }
    return best_p;
}

/// Single-carrier Gray 16-QAM over AWGN, independent of the library's mapper: the symbol is the
/// nearest of all 16 points, found by exhaustive search; returns the bit error ratio.
inline double mc_ber_16qam(double ebn0_db, long long n_bits, std::uint64_t seed) {
    // Gray code per axis from a two-bit binary index: g = b ^ (b >> 1), levels -3, -1, 1, 3.
    std::complex<double> points[16];
    unsigned labels[16];
    const double scale = 1.0 / std::sqrt(10.0);
    for (unsigned i = 0; i < 4; ++i) {
        for (unsigned q = 0; q < 4; ++q) {
            const unsigned idx = i * 4 + q;
            points[idx] = {(2.0 * i - 3.0) * scale, (2.0 * q - 3.0) * scale};
            labels[idx] = ((i ^ (i >> 1)) << 2) | (q ^ (q >> 1));
        }
    }
    const double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    const double sigma = std::sqrt(1.0 / (4.0 * ebn0) / 2.0);  // Es = 1 = 4 Eb
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, sigma);
    long long errors = 0;
    const long long symbols = n_bits / 4;
    for (long long s = 0; s < symbols; ++s) {
        const unsigned idx = static_cast<unsigned>(rng() & 15u);
        const auto y = points[idx] + std::complex<double>(g(rng), g(rng));
        unsigned best = 0;
        double dmin = 1e300;
        for (unsigned j = 0; j < 16; ++j) {
            const double d = std::norm(y - points[j]);
            if (d < dmin) {
                dmin = d;
                best = j;
            }
        }
        errors += __builtin_popcount(labels[idx] ^ labels[best]);
    }
    return static_cast<double>(errors) / static_cast<double>(symbols * 4);
}

}  // namespace oracle
