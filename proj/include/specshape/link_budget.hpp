#pragma once

#include <vector>

#include "specshape/allocator.hpp"
#include "specshape/grid.hpp"
#include "specshape/pulse_train.hpp"

namespace specshape {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K

/// 20 log10(4 pi d f / c).
double free_space_loss_db(double distance_m, double freq_hz);

/// k_B * T * 10^(NF/10), W/Hz.
double noise_density(double noise_temp_k, double noise_figure_db);

/// Desired transmitter, interfering ground stations and receiver on a free-space AWGN channel.
struct LinkScenario {
    double d_tx_rx_m = 10e3;
    double d_intf_rx_m = 200e3;
    double carrier_freq_hz = 1e9;
    double tx_power_w = 1.0;
    std::vector<PulseTrainSpec> interferers;  ///< transmit-side peak powers
    double noise_temp_k = 290.0;
    double noise_figure_db = 6.0;
    double desired_gain_db = 0.0;     ///< net antenna/system gain on the desired leg
    double interferer_gain_db = 0.0;  ///< net gain on each interferer leg

    void validate() const;
};

struct ReceiverPowers {
    double signal_w = 0.0;
    std::vector<double> interferer_mean_w;  ///< time-averaged, one per emitter
    double noise_density_w_per_hz = 0.0;
};

/// Linear power gain (<= 1 for zero antenna gain) of each leg.
double desired_path_gain(const LinkScenario& s);
double interferer_path_gain(const LinkScenario& s);

ReceiverPowers receiver_powers(const LinkScenario& s);

/// Interferer specs as seen at the receiver: peak power scaled by the interferer path gain.
std::vector<PulseTrainSpec> receiver_pulse_specs(const LinkScenario& s);

/// Receiver-side PSD of every interferer.
std::vector<AnalyticPsd> receiver_psds(const LinkScenario& s);

/// Interference plus noise per subcarrier at the receiver.
InterferenceProfile scenario_profile(const LinkScenario& s, const SubcarrierGrid& grid);

/// Allocation problem for the scenario: receiver-referred total power, profile and K.
AllocationRequest scenario_request(const LinkScenario& s, const SubcarrierGrid& grid, double k);

/// Eb/N0 in dB for an allocation carrying bits_per_symbol on each active subcarrier.
/// The bit rate is N_u * bits / T with T = 1 / spacing; a positive cp_duration_s adds the cyclic
/// prefix to T, which raises Eb by the CP overhead.
/// Throws ValidationError for an empty allocation.
double ebn0_db(const LinkScenario& s, const Allocation& alloc, const SubcarrierGrid& grid,
               int bits_per_symbol, double cp_duration_s = 0.0);

/// Same quantity from raw numbers: rx signal power, active count, spacing and noise density.
double ebn0_db(double rx_signal_w, int n_active, double spacing_hz, double noise_density_w_per_hz,
               int bits_per_symbol, double cp_duration_s = 0.0);

}  // namespace specshape
