#include "specshape/link_budget.hpp"

#include <cmath>
#include <numbers>

#include "specshape/errors.hpp"

namespace specshape {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

double free_space_loss_db(double distance_m, double freq_hz) {
    if (!(distance_m > 0.0) || !(freq_hz > 0.0)) {
        throw ValidationError("free-space loss: distance and frequency must be positive");
    }
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * freq_hz / kSpeedOfLight);
}

double noise_density(double noise_temp_k, double noise_figure_db) {
    if (!(noise_temp_k > 0.0)) throw ValidationError("noise temperature must be positive");
    return kBoltzmann * noise_temp_k * db_to_linear(noise_figure_db);
}

void LinkScenario::validate() const {
    if (!(d_tx_rx_m > 0.0) || !(d_intf_rx_m > 0.0)) {
        throw ValidationError("link: distances must be positive");
    }
    if (!(carrier_freq_hz > 0.0)) throw ValidationError("link: carrier frequency must be positive");
    if (!(tx_power_w > 0.0)) throw ValidationError("link: transmit power must be positive");
    if (!(noise_temp_k > 0.0)) throw ValidationError("link: noise temperature must be positive");
    if (!std::isfinite(noise_figure_db) || !std::isfinite(desired_gain_db) ||
        !std::isfinite(interferer_gain_db)) {
        throw ValidationError("link: noise figure and gains must be finite");
    }
    for (const auto& spec : interferers) spec.validate();
}

double desired_path_gain(const LinkScenario& s) {
    return db_to_linear(s.desired_gain_db - free_space_loss_db(s.d_tx_rx_m, s.carrier_freq_hz));
}

double interferer_path_gain(const LinkScenario& s) {
    return db_to_linear(s.interferer_gain_db - free_space_loss_db(s.d_intf_rx_m, s.carrier_freq_hz));
}

ReceiverPowers receiver_powers(const LinkScenario& s) {
    s.validate();
    ReceiverPowers r;
    r.signal_w = s.tx_power_w * desired_path_gain(s);
    const double g = interferer_path_gain(s);
    for (const auto& spec : s.interferers) r.interferer_mean_w.push_back(train_mean_power(spec) * g);
    r.noise_density_w_per_hz = noise_density(s.noise_temp_k, s.noise_figure_db);
    return r;
}

std::vector<PulseTrainSpec> receiver_pulse_specs(const LinkScenario& s) {
    s.validate();
    const double g = interferer_path_gain(s);
    std::vector<PulseTrainSpec> out = s.interferers;
    for (auto& spec : out) spec.peak_power_w *= g;
    return out;
}

std::vector<AnalyticPsd> receiver_psds(const LinkScenario& s) {
    const auto powers = receiver_powers(s);
    std::vector<AnalyticPsd> out;
    for (std::size_t i = 0; i < s.interferers.size(); ++i) {
        out.push_back(analytic_psd(s.interferers[i], powers.interferer_mean_w[i]));
    }
    return out;
}

InterferenceProfile scenario_profile(const LinkScenario& s, const SubcarrierGrid& grid) {
    const auto powers = receiver_powers(s);
    return with_noise(integrate_interference(grid, receiver_psds(s)), grid,
                      powers.noise_density_w_per_hz);
}

AllocationRequest scenario_request(const LinkScenario& s, const SubcarrierGrid& grid, double k) {
    AllocationRequest req;
    req.profile = scenario_profile(s, grid);
    req.grid = grid;
    req.total_power_w = receiver_powers(s).signal_w;
    req.k_threshold = k;
    req.validate();
    return req;
}

double ebn0_db(double rx_signal_w, int n_active, double spacing_hz, double noise_density_w_per_hz,
               int bits_per_symbol, double cp_duration_s) {
    if (n_active <= 0) throw ValidationError("Eb/N0 is undefined for an empty allocation");
    if (bits_per_symbol <= 0 || !(spacing_hz > 0.0) || !(noise_density_w_per_hz > 0.0) ||
        cp_duration_s < 0.0) {
        throw ValidationError("Eb/N0: invalid rate or noise parameters");
    }
    const double symbol_time = 1.0 / spacing_hz + cp_duration_s;
    const double bit_rate = n_active * bits_per_symbol / symbol_time;
    return 10.0 * std::log10(rx_signal_w / (bit_rate * noise_density_w_per_hz));
}

double ebn0_db(const LinkScenario& s, const Allocation& alloc, const SubcarrierGrid& grid,
               int bits_per_symbol, double cp_duration_s) {
    const auto powers = receiver_powers(s);
    return ebn0_db(powers.signal_w, alloc.n_active, grid.spacing_hz, powers.noise_density_w_per_hz,
                   bits_per_symbol, cp_duration_s);
}

}  // namespace specshape
