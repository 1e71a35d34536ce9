#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "specshape/allocator.hpp"
#include "specshape/grid.hpp"
#include "specshape/link_budget.hpp"
#include "specshape/pulse_train.hpp"
#include "specshape/table.hpp"
#include "specshape/waveform.hpp"

namespace specshape {

/// Exact bit error probability of Gray-coded 16-QAM on AWGN:
/// (1/4) [3 Q(x) + 2 Q(3x) - Q(5x)], x = sqrt(0.8 Eb/N0).
double awgn_ber_16qam(double ebn0_db);

enum class InterferenceMode {
    TimeDomain,         ///< sampled pulse trains added to the received samples
    GaussianSurrogate,  ///< per-subcarrier complex Gaussian with variance I_n; fast but approximate
};

std::string to_string(InterferenceMode mode);
InterferenceMode interference_mode_from_string(const std::string& name);

struct StoppingRule {
    long long min_bits = 1'000'000;
    long long min_errors = 100;
    long long max_bits = 100'000'000;
    int batch_symbols = 32;  ///< multicarrier symbols per RNG batch

    void validate() const;
};

/// Everything the engine needs for one operating point, already referred to the receiver.
struct BerSystem {
    std::string label;
    SubcarrierGrid grid;
    OfdmLayout layout;
    Allocation allocation;         ///< receiver-side powers
    InterferenceProfile profile;   ///< used by the Gaussian surrogate and for reporting
    std::vector<PulseTrainSpec> rx_interferers;
    double noise_density_w_per_hz = 0.0;
    double ebn0_db = 0.0;
    double d_tx_rx_m = 0.0;
    double d_intf_rx_m = 0.0;
    InterferenceMode mode = InterferenceMode::TimeDomain;
};

/// Spectrally shaped system: water-filling allocation with threshold K on the scenario grid.
BerSystem make_shaped_system(const LinkScenario& s, const SubcarrierGrid& grid, double k,
                             int oversampling, InterferenceMode mode = InterferenceMode::TimeDomain);

/// Fixed-band baseline: 50 used subcarriers of the 64-point inlay grid, equal power, CP of
/// 17.6 us. With cp_in_eb the reported Eb/N0 includes the CP overhead.
BerSystem make_flat_system(const LinkScenario& s, int oversampling,
                           InterferenceMode mode = InterferenceMode::TimeDomain, bool cp_in_eb = false);

inline constexpr double kLdacsCpSeconds = 17.6e-6;

struct BerPoint {
    std::string label;
    double d_tx_rx_m = 0.0;
    double d_intf_rx_m = 0.0;
    double ebn0_db = 0.0;
    double ber = 0.0;
    long long bits = 0;
    long long errors = 0;
    double ci95 = 0.0;        ///< 1.96 sqrt(p (1 - p) / bits)
    bool floor_flag = false;  ///< bit cap reached before min_errors: ber is an upper-side estimate
    double theory = 0.0;      ///< awgn_ber_16qam(ebn0_db)
    int n_active = 0;
    std::string mode;

    /// |ber - theory| <= 3 sqrt(theory (1 - theory) / bits)
    bool within_3sigma() const;
};

/// Monte-Carlo BER of one system. Batch b uses the stream (seed, point_index, b) and batches are
/// accumulated in order, so the result does not depend on the thread count.
/// Throws ValidationError for an empty allocation or an interferer the sample rate cannot carry.
BerPoint run_ber_point(const BerSystem& system, const StoppingRule& rule, std::uint64_t seed,
                       std::uint64_t point_index, int threads = 1);

using SystemFactory = std::function<BerSystem(const LinkScenario&)>;

/// One point per desired-link distance; the system (and its allocation) is rebuilt for each.
std::vector<BerPoint> run_ber_curve(const LinkScenario& tmpl, const std::vector<double>& d_tx_rx_m,
                                    const SystemFactory& factory, const StoppingRule& rule,
                                    std::uint64_t seed, int threads = 1);

/// Columns: label, d_tx_rx_m, d_intf_rx_m, ebn0_db, ber, bits, errors, ci95, floor_flag, theory, n_active.
Table ber_table(const std::vector<BerPoint>& points, const std::string& name = "ber");

/// Mean |Y_n|^2 over all subcarriers after demodulating pure noise of the given density.
double measure_subcarrier_noise(const OfdmLayout& layout, double noise_density_w_per_hz,
                                int n_symbols, std::uint64_t seed);

/// Mean sample power of the superposed receiver-side pulse trains over duration_s.
double measure_interference_power(const std::vector<PulseTrainSpec>& rx_specs, double sample_rate_hz,
                                  double duration_s, std::uint64_t seed);

}  // namespace specshape
