#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "specshape/grid.hpp"
#include "specshape/table.hpp"

namespace specshape {

struct AllocationRequest {
    InterferenceProfile profile;
    SubcarrierGrid grid;
    double total_power_w = 1.0;
    double k_threshold = 1.0;

    /// Throws ValidationError on non-positive power or K, or a profile/grid mismatch.
    void validate() const;
};

/// Per-subcarrier activity and power. Vectors are indexed n - 1.
struct Allocation {
    std::vector<bool> active;
    std::vector<double> powers_w;
    double water_level_w = 0.0;  ///< P_n + gamma_n^2 on the active set
    double capacity_bps = 0.0;
    double spectral_efficiency = 0.0;
    int n_active = 0;
    double k_threshold = 0.0;
    int threshold_ties = 0;  ///< subcarriers excluded because I_n == K * spacing * sigma^2 exactly

    bool empty() const { return n_active == 0; }
    std::vector<int> active_indices() const;
    double total_power() const;
};

/// Subcarriers allowed to carry data: not a forced null and I_n < K * spacing * sigma^2 (strict).
std::vector<bool> eligible_mask(const AllocationRequest& req, int* ties = nullptr);

/// Iterative water-filling: start from the eligible subcarriers, drop any whose tentative power
/// (P_T + sum gamma^2) / N_rem - gamma_n^2 is not positive, and repeat until every survivor has
/// positive power.
/// Returns an empty allocation (all inactive, zero capacity) when nothing is eligible.
Allocation solve_waterfill(const AllocationRequest& req);

/// Independent solution of the same problem by bisection on the water level over the eligible
/// set, followed by a KKT check. Throws NumericalError if the check fails.
Allocation oracle_waterfill(const AllocationRequest& req);

struct KktReport {
    bool ok = true;
    double max_level_deviation = 0.0;  ///< relative spread of P_n + gamma_n^2 over the active set
    double power_sum_error = 0.0;      ///< |sum P_n - P_T| / P_T
    std::string message;
};

/// Checks the water-level, power-sum and active-set conditions of an allocation.
KktReport check_kkt(const Allocation& alloc, const AllocationRequest& req,
                    double level_tol = 1e-9, double power_tol = 1e-12);

struct CapacityResult {
    double capacity_bps = 0.0;
    double spectral_efficiency = 0.0;  ///< capacity / ((N_u + 1) * spacing)
};

/// sum over active n of spacing * log2(1 + P_n / gamma_n^2).
CapacityResult capacity_of(const Allocation& alloc, const InterferenceProfile& profile,
                           const SubcarrierGrid& grid);

/// Equal power over every usable (non-forced-null) subcarrier, ignoring interference.
Allocation flat_allocation(const SubcarrierGrid& grid, const InterferenceProfile& profile,
                           double total_power_w);

struct KSweepRow {
    double k = 0.0;
    int n_active = 0;
    double capacity_bps = 0.0;
    double spectral_efficiency = 0.0;
};

std::vector<KSweepRow> k_sweep(const AllocationRequest& tmpl, const std::vector<double>& k_values);

/// Columns: index, f_n_hz, alpha, P_n_w, I_n_w, gamma2_w.
Table allocation_table(const Allocation& alloc, const AllocationRequest& req);

/// water_level_w, capacity_bps, spectral_efficiency, n_active, K, active indices, ties.
nlohmann::json allocation_summary(const Allocation& alloc);

}  // namespace specshape
