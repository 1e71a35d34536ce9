#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "specshape/allocator.hpp"
#include "specshape/fft.hpp"
#include "specshape/grid.hpp"
#include "specshape/table.hpp"

namespace specshape {

using cvec = std::vector<std::complex<double>>;

/// Per-subcarrier amplitude factors A_n, index n - 1.
struct WeightVector {
    std::vector<double> weights;

    double total_power() const;
};

/// A_n = sqrt(P_n).
WeightVector weights_from_allocation(const Allocation& alloc);

/// Sampling layout of one multicarrier symbol: M = N * oversampling samples per core symbol at
/// fs = M * spacing, preceded by round(cp_fraction * M) cyclic-prefix samples.
struct OfdmLayout {
    int n_subcarriers = 128;
    double spacing_hz = 7812.5;
    int oversampling = 1;
    double cp_fraction = 0.0;

    void validate() const;
    int fft_size() const { return n_subcarriers * oversampling; }
    int cp_samples() const;
    int block_samples() const { return fft_size() + cp_samples(); }
    double sample_rate() const { return fft_size() * spacing_hz; }
    /// DFT bin of subcarrier n (1-based) in a transform of fft_size().
    int bin(int n) const;
};

OfdmLayout layout_for(const SubcarrierGrid& grid, int oversampling, double cp_fraction = 0.0);

/// Reusable OFDM modulator/demodulator.
///
/// Modulation: x[m] = sum_n A_n s_n exp(j 2 pi f_n m / fs) for m in [-cp, M), so a block with
/// unit-power symbols has mean sample power sum A_n^2. Demodulation removes the CP and returns
/// Y_n = (1/M) sum_m x[m] exp(-j 2 pi f_n m / fs), which inverts modulation up to the weights.
class OfdmModem {
public:
    explicit OfdmModem(OfdmLayout layout);

    const OfdmLayout& layout() const { return layout_; }

    /// symbols and weights have N entries; out has block_samples() entries.
    void modulate(std::span<const std::complex<double>> symbols, const WeightVector& weights,
                  std::span<std::complex<double>> out) const;
    /// block has block_samples() entries; out has N entries.
    void demodulate(std::span<const std::complex<double>> block,
                    std::span<std::complex<double>> out) const;

private:
    OfdmLayout layout_;
    Fft inverse_;
    Fft forward_;
};

cvec ofdm_modulate(std::span<const std::complex<double>> symbols, const WeightVector& weights,
                   const OfdmLayout& layout);
cvec ofdm_demodulate(std::span<const std::complex<double>> block, const OfdmLayout& layout);

/// PHYDYAS prototype for a transform of size m_size and overlap factor 4:
/// h[m] = 1 + 2 sum_k (-1)^k H_k cos(2 pi k m / (K M)), m = 0..KM-1, with
/// H = {1, 0.97195983, 1/sqrt(2), 0.23514695}. The taps satisfy h[m] = h[KM - m] and
/// sum h / (K M) = 1, i.e. unit response at DC.
struct PrototypeFilter {
    int overlap = 4;
    int m_size = 0;
    std::vector<double> taps;

    static PrototypeFilter phydyas(int m_size);
    double dc_response() const;
};

inline constexpr double kPhydyasH1 = 0.97195983;
inline constexpr double kPhydyasH2 = 0.70710678118654752;
inline constexpr double kPhydyasH3 = 0.23514695;

/// Converts complex symbol blocks (N per block) to the OQAM real stream: for every block the
/// real parts form one N-value half-period and the imaginary parts the next.
std::vector<double> oqam_stagger(std::span<const std::complex<double>> blocks, int n_subcarriers);

/// SMT synthesis: each N-value half-period of the real stream is weighted, phase-rotated by
/// j^(n + k), spread over K*M samples by the prototype and added at offset k*M/2. The prototype
/// is scaled so that a subcarrier carrying unit-power OQAM symbols has mean power A_n^2.
/// The stream length must be a positive multiple of N.
cvec fbmc_synthesize(std::span<const double> stream, const WeightVector& weights,
                     const PrototypeFilter& proto, const OfdmLayout& layout);

struct Psd {
    std::vector<double> freq_hz;      ///< ascending, -fs/2 .. fs/2 - fs/nfft
    std::vector<double> density;      ///< W/Hz
    double bin_width_hz = 0.0;

    double integral() const;
    /// Mean density over [lo, hi).
    double mean_density(double lo, double hi) const;
    double at(double f) const;
};

/// Welch estimate: Hann window, 50 % overlap, periodograms scaled by 1/(fs * sum w^2).
/// Throws PreconditionError when the series is shorter than 8 * nfft.
Psd measure_psd(std::span<const std::complex<double>> series, double sample_rate_hz, int nfft);

/// FFT size giving a 100 Hz grid at the given sample rate.
int nfft_for_resolution(double sample_rate_hz, double resolution_hz = 100.0);

/// Columns: freq_hz, density_w_per_hz.
Table psd_table(const Psd& psd, const std::string& name = "psd");

/// Writes interleaved float64 I/Q to path and {"sample_rate", "length"} to path + ".json".
void write_baseband(const std::filesystem::path& path, std::span<const std::complex<double>> series,
                    double sample_rate_hz);
cvec read_baseband(const std::filesystem::path& path, double* sample_rate_hz = nullptr);

}  // namespace specshape
