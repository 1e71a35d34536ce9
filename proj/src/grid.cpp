#include "specshape/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "specshape/errors.hpp"

namespace specshape {

bool SubcarrierGrid::is_forced_null(int n) const {
    return std::binary_search(forced_nulls.begin(), forced_nulls.end(), n);
}

std::vector<int> SubcarrierGrid::usable_indices() const {
    std::vector<int> out;
    for (int n = 1; n <= n_subcarriers; ++n) {
        if (!is_forced_null(n)) out.push_back(n);
    }
    return out;
}

SubcarrierGrid make_grid(int n_subcarriers, double total_bandwidth_hz, std::vector<int> forced_nulls) {
    if (n_subcarriers < 2 || !std::has_single_bit(static_cast<unsigned>(n_subcarriers))) {
        throw ValidationError("grid: number of subcarriers must be a power of two, got " +
                              std::to_string(n_subcarriers));
    }
    if (!(total_bandwidth_hz > 0.0) || !std::isfinite(total_bandwidth_hz)) {
        throw ValidationError("grid: total bandwidth must be positive");
    }
    std::sort(forced_nulls.begin(), forced_nulls.end());
    forced_nulls.erase(std::unique(forced_nulls.begin(), forced_nulls.end()), forced_nulls.end());
    for (int n : forced_nulls) {
        if (n < 1 || n > n_subcarriers) {
            throw ValidationError("grid: forced-null index " + std::to_string(n) + " out of range");
        }
    }

    SubcarrierGrid g;
    g.n_subcarriers = n_subcarriers;
    g.total_bandwidth_hz = total_bandwidth_hz;
    // Exact for powers of two.
    g.spacing_hz = total_bandwidth_hz / n_subcarriers;
    g.centers_hz.resize(n_subcarriers);
    for (int n = 1; n <= n_subcarriers; ++n) {
        g.centers_hz[n - 1] = -0.5 * total_bandwidth_hz + (n - 1) * g.spacing_hz;
    }
    g.forced_nulls = std::move(forced_nulls);
    return g;
}

SubcarrierGrid build_grid(int n_subcarriers, double total_bandwidth_hz, double guard_fraction) {
    if (n_subcarriers != 16 && n_subcarriers != 32 && n_subcarriers != 64 && n_subcarriers != 128) {
        throw ValidationError("grid: N must be one of 16, 32, 64, 128, got " +
                              std::to_string(n_subcarriers));
    }
    const double guard = guard_fraction * n_subcarriers;
    if (!(guard_fraction >= 0.0 && guard_fraction < 0.5) || guard != std::floor(guard)) {
        std::ostringstream msg;
        msg << "grid: guard fraction " << guard_fraction << " must lie in [0, 0.5) and give an "
            << "integral number of guard subcarriers for N = " << n_subcarriers;
        throw ValidationError(msg.str());
    }
    const int edge = static_cast<int>(guard);
    std::vector<int> nulls;
    for (int n = 1; n <= edge + 1; ++n) nulls.push_back(n);
    nulls.push_back(n_subcarriers / 2 + 1);
    for (int n = n_subcarriers - edge + 1; n <= n_subcarriers; ++n) nulls.push_back(n);
    return make_grid(n_subcarriers, total_bandwidth_hz, std::move(nulls));
}

SubcarrierGrid ldacs_grid() {
    std::vector<int> nulls;
    for (int n = 1; n <= 7; ++n) nulls.push_back(n);
    nulls.push_back(33);
    for (int n = 59; n <= 64; ++n) nulls.push_back(n);
    return make_grid(64, 625e3, std::move(nulls));
}

InterferenceProfile integrate_interference(const SubcarrierGrid& grid,
                                           const std::vector<AnalyticPsd>& psds) {
    InterferenceProfile p;
    p.interference_w.assign(grid.n_subcarriers, 0.0);
    const double half = 0.5 * grid.spacing_hz;
    for (const auto& psd : psds) {
        // Absolute floor far below any noise level of interest; keeps deep-tail bins from
        // chasing a relative tolerance on values near underflow.
        const QuadratureTolerance tol{1e-15 * psd.mean_power(), 1e-10};
        for (int n = 1; n <= grid.n_subcarriers; ++n) {
            const double f = grid.center(n);
            try {
                p.interference_w[n - 1] += psd.band_power(f - half, f + half, tol);
            } catch (const NumericalError& e) {
                throw NumericalError("interference integral failed on subcarrier " +
                                         std::to_string(n) + ": " + e.what(),
                                     n);
            }
        }
    }
    return p;
}

InterferenceProfile with_noise(InterferenceProfile profile, const SubcarrierGrid& grid,
                               double noise_density_w_per_hz) {
    if (!(noise_density_w_per_hz > 0.0) || !std::isfinite(noise_density_w_per_hz)) {
        throw ValidationError("profile: noise density must be positive");
    }
    if (profile.size() != grid.n_subcarriers) {
        throw ValidationError("profile: length does not match the grid");
    }
    profile.noise_density_w_per_hz = noise_density_w_per_hz;
    profile.noise_per_subcarrier_w = noise_density_w_per_hz * grid.spacing_hz;
    return profile;
}

Table profile_table(const SubcarrierGrid& grid, const InterferenceProfile& profile) {
    if (profile.size() != grid.n_subcarriers) {
        throw ValidationError("profile: length does not match the grid");
    }
    Table t{"interference", {"index", "f_n_hz", "I_n_w", "noise_w"}, {}};
    for (int n = 1; n <= grid.n_subcarriers; ++n) {
        t.add_row({cell(n), cell(grid.center(n)), cell(profile.interference_w[n - 1]),
                   cell(profile.noise_per_subcarrier_w)});
    }
    return t;
}

}  // namespace specshape
