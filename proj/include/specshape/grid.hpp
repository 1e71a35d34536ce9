#pragma once

#include <vector>

#include "specshape/pulse_train.hpp"
#include "specshape/table.hpp"

namespace specshape {

/// N uniformly spaced subcarriers over a band centred on 0 Hz. Subcarrier indices are 1-based:
/// f_n = -BW/2 + (n - 1) * spacing, so n = N/2 + 1 sits at DC and n = 1 at the lower band edge.
struct SubcarrierGrid {
    int n_subcarriers = 0;
    double total_bandwidth_hz = 0.0;
    double spacing_hz = 0.0;
    std::vector<double> centers_hz;    ///< centers_hz[n - 1] = f_n
    std::vector<int> forced_nulls;     ///< sorted, 1-based

    double center(int n) const { return centers_hz.at(n - 1); }
    int dc_index() const { return n_subcarriers / 2 + 1; }
    bool is_forced_null(int n) const;
    /// Indices that are not forced nulls.
    std::vector<int> usable_indices() const;
};

/// Standard grid: n in {16, 32, 64, 128}; forced nulls {1..gN+1} u {N/2+1} u {N-gN+1..N}
/// with g = guard_fraction (0.25 gives the outer quarters plus DC).
SubcarrierGrid build_grid(int n_subcarriers, double total_bandwidth_hz = 1e6,
                          double guard_fraction = 0.25);

/// Grid with an explicit forced-null set; any power-of-two N from 2 up.
SubcarrierGrid make_grid(int n_subcarriers, double total_bandwidth_hz, std::vector<int> forced_nulls);

/// Fixed-band inlay numerology: N = 64, spacing 9765.625 Hz, 50 used subcarriers
/// (indices 8..32 and 34..58), DC and the outer 7/6 subcarriers unused.
SubcarrierGrid ldacs_grid();

/// Per-subcarrier interference plus thermal noise.
struct InterferenceProfile {
    std::vector<double> interference_w;   ///< I_n, index n - 1
    double noise_density_w_per_hz = 0.0;  ///< sigma^2
    double noise_per_subcarrier_w = 0.0;  ///< spacing * sigma^2

    /// gamma_n^2 = I_n + spacing * sigma^2
    double gamma2(int n) const { return interference_w.at(n - 1) + noise_per_subcarrier_w; }
    int size() const { return static_cast<int>(interference_w.size()); }
};

/// I_n = sum over emitters of the PSD integrated over [f_n - spacing/2, f_n + spacing/2].
/// Noise fields are left at zero. A quadrature failure is reported with its subcarrier index.
InterferenceProfile integrate_interference(const SubcarrierGrid& grid,
                                           const std::vector<AnalyticPsd>& psds);

/// Copy of profile with the noise fields filled in for the given density.
InterferenceProfile with_noise(InterferenceProfile profile, const SubcarrierGrid& grid,
                               double noise_density_w_per_hz);

/// Columns: index, f_n_hz, I_n_w, noise_w.
Table profile_table(const SubcarrierGrid& grid, const InterferenceProfile& profile);

}  // namespace specshape
