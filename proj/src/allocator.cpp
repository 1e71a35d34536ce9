#include "specshape/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "specshape/errors.hpp"

namespace specshape {

namespace {

Allocation empty_allocation(const AllocationRequest& req) {
    Allocation a;
    a.active.assign(req.grid.n_subcarriers, false);
    a.powers_w.assign(req.grid.n_subcarriers, 0.0);
    a.k_threshold = req.k_threshold;
    return a;
}

void finish(Allocation& a, const AllocationRequest& req) {
    a.n_active = static_cast<int>(std::count(a.active.begin(), a.active.end(), true));
    const auto cap = capacity_of(a, req.profile, req.grid);
    a.capacity_bps = cap.capacity_bps;
    a.spectral_efficiency = cap.spectral_efficiency;
}

}  // namespace

void AllocationRequest::validate() const {
    if (!(total_power_w > 0.0) || !std::isfinite(total_power_w)) {
        throw ValidationError("allocation: total power must be positive");
    }
    if (!(k_threshold > 0.0)) throw ValidationError("allocation: K must be positive");
    if (profile.size() != grid.n_subcarriers) {
        throw ValidationError("allocation: profile length " + std::to_string(profile.size()) +
                              " does not match N = " + std::to_string(grid.n_subcarriers));
    }
    if (!(profile.noise_per_subcarrier_w > 0.0)) {
        throw ValidationError("allocation: profile has no noise level");
    }
    for (double i : profile.interference_w) {
        if (!(i >= 0.0) || !std::isfinite(i)) {
            throw ValidationError("allocation: interference powers must be finite and non-negative");
        }
    }
}

std::vector<int> Allocation::active_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < active.size(); ++i) {
        if (active[i]) out.push_back(static_cast<int>(i) + 1);
    }
    return out;
}

double Allocation::total_power() const {
    return std::accumulate(powers_w.begin(), powers_w.end(), 0.0);
}

std::vector<bool> eligible_mask(const AllocationRequest& req, int* ties) {
    const double threshold = req.k_threshold * req.profile.noise_per_subcarrier_w;
    std::vector<bool> mask(req.grid.n_subcarriers, false);
    int tie_count = 0;
    for (int n = 1; n <= req.grid.n_subcarriers; ++n) {
        if (req.grid.is_forced_null(n)) continue;
        const double i = req.profile.interference_w[n - 1];
        if (i == threshold) ++tie_count;
        mask[n - 1] = i < threshold;
    }
    if (ties) *ties = tie_count;
    return mask;
}

Allocation solve_waterfill(const AllocationRequest& req) {
    req.validate();
    const int n_total = req.grid.n_subcarriers;
    Allocation out = empty_allocation(req);
    const auto eligible = eligible_mask(req, &out.threshold_ties);

    // Ineligible subcarriers leave before the first level is computed: counting them in the
    // level would understate it and could drop a subcarrier the optimum keeps.
    std::vector<int> candidates;
    for (int n = 1; n <= n_total; ++n) {
        if (eligible[n - 1]) candidates.push_back(n);
    }
    std::vector<double> tentative;
    double level = 0.0;

    while (!candidates.empty()) {
        double gamma_sum = 0.0;
        for (int n : candidates) gamma_sum += req.profile.gamma2(n);
        level = (req.total_power_w + gamma_sum) / static_cast<double>(candidates.size());

        std::vector<int> survivors;
        survivors.reserve(candidates.size());
        tentative.clear();
        for (int n : candidates) {
            const double p = level - req.profile.gamma2(n);
            if (p > 0.0) {
                survivors.push_back(n);
                tentative.push_back(p);
            }
        }
        if (survivors.size() == candidates.size()) break;
        if (survivors.size() > candidates.size()) {
            throw NumericalError("water-filling: candidate set failed to shrink");
        }
        candidates = std::move(survivors);
    }

    if (candidates.empty()) return out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        out.active[candidates[i] - 1] = true;
        out.powers_w[candidates[i] - 1] = tentative[i];
    }
    out.water_level_w = level;
    finish(out, req);
    return out;
}

Allocation oracle_waterfill(const AllocationRequest& req) {
    req.validate();
    Allocation out = empty_allocation(req);
    const auto eligible = eligible_mask(req, &out.threshold_ties);

    std::vector<double> gammas;
    std::vector<int> indices;
    for (int n = 1; n <= req.grid.n_subcarriers; ++n) {
        if (eligible[n - 1]) {
            indices.push_back(n);
            gammas.push_back(req.profile.gamma2(n));
        }
    }
    if (indices.empty()) return out;

    const double pt = req.total_power_w;
    auto filled = [&](double w) {
        double s = 0.0;
        for (double g : gammas) s += std::max(0.0, w - g);
        return s;
    };
    // filled(lo) = 0 < P_T <= filled(hi)
    double lo = *std::min_element(gammas.begin(), gammas.end());
    double hi = lo + pt;
    double w = hi;
    for (int iter = 0; iter < 2000; ++iter) {
        w = 0.5 * (lo + hi);
        if (w <= lo || w >= hi) break;
        const double s = filled(w);
        if (std::abs(s - pt) <= 1e-14 * pt) break;
        (s < pt ? lo : hi) = w;
    }
    if (std::abs(filled(w) - pt) > 1e-12 * pt) {
        // Interval collapsed at machine precision; take whichever end is closer.
        w = std::abs(filled(lo) - pt) < std::abs(filled(hi) - pt) ? lo : hi;
    }

    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double p = w - gammas[i];
        if (p > 0.0) {
            out.active[indices[i] - 1] = true;
            out.powers_w[indices[i] - 1] = p;
        }
    }
    out.water_level_w = w;
    finish(out, req);

    const auto kkt = check_kkt(out, req);
    if (!kkt.ok) throw NumericalError("oracle water-filling failed its KKT check: " + kkt.message);
    return out;
}

KktReport check_kkt(const Allocation& alloc, const AllocationRequest& req, double level_tol,
                    double power_tol) {
    KktReport r;
    auto fail = [&r](const std::string& why) {
        if (r.ok) r.message = why;
        r.ok = false;
    };
    const int n_total = req.grid.n_subcarriers;
    if (static_cast<int>(alloc.active.size()) != n_total ||
        static_cast<int>(alloc.powers_w.size()) != n_total) {
        fail("allocation length does not match the grid");
        return r;
    }
    const auto eligible = eligible_mask(req);
    const double pt = req.total_power_w;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int n = 1; n <= n_total; ++n) {
        const double p = alloc.powers_w[n - 1];
        const double level = p + req.profile.gamma2(n);
        if (p < 0.0) fail("negative power on subcarrier " + std::to_string(n));
        if (alloc.active[n - 1]) {
            if (!eligible[n - 1]) fail("ineligible subcarrier " + std::to_string(n) + " is active");
            lo = std::min(lo, level);
            hi = std::max(hi, level);
        } else if (p != 0.0) {
            fail("inactive subcarrier " + std::to_string(n) + " carries power");
        }
    }
    if (alloc.n_active == 0) return r;

    r.max_level_deviation = (hi - lo) / hi;
    if (r.max_level_deviation > level_tol) {
        std::ostringstream msg;
        msg << "water level varies by " << r.max_level_deviation << " across the active set";
        fail(msg.str());
    }
    r.power_sum_error = std::abs(alloc.total_power() - pt) / pt;
    if (r.power_sum_error > power_tol) {
        std::ostringstream msg;
        msg << "powers sum to " << alloc.total_power() << " instead of " << pt;
        fail(msg.str());
    }
    // An eligible subcarrier below the water level would gain from power: complementary slackness.
    const double level = 0.5 * (lo + hi);
    for (int n = 1; n <= n_total; ++n) {
        if (eligible[n - 1] && !alloc.active[n - 1] &&
            req.profile.gamma2(n) < level * (1.0 - level_tol)) {
            fail("eligible subcarrier " + std::to_string(n) + " lies below the water level but is idle");
        }
    }
    return r;
}

CapacityResult capacity_of(const Allocation& alloc, const InterferenceProfile& profile,
                           const SubcarrierGrid& grid) {
    const auto n_total = static_cast<std::size_t>(grid.n_subcarriers);
    if (alloc.active.size() != n_total || alloc.powers_w.size() != n_total ||
        profile.interference_w.size() != n_total) {
        throw ValidationError("capacity: allocation, profile and grid lengths differ");
    }
    CapacityResult r;
    int n_used = 0;
    for (std::size_t i = 0; i < n_total; ++i) {
        if (!alloc.active[i]) continue;
        ++n_used;
        r.capacity_bps += grid.spacing_hz *
                          std::log2(1.0 + alloc.powers_w[i] / profile.gamma2(static_cast<int>(i) + 1));
    }
    if (n_used > 0) r.spectral_efficiency = r.capacity_bps / ((n_used + 1) * grid.spacing_hz);
    return r;
}

Allocation flat_allocation(const SubcarrierGrid& grid, const InterferenceProfile& profile,
                           double total_power_w) {
    if (!(total_power_w > 0.0)) throw ValidationError("flat allocation: total power must be positive");
    const auto used = grid.usable_indices();
    Allocation a;
    a.active.assign(grid.n_subcarriers, false);
    a.powers_w.assign(grid.n_subcarriers, 0.0);
    if (used.empty()) return a;
    const double p = total_power_w / static_cast<double>(used.size());
    for (int n : used) {
        a.active[n - 1] = true;
        a.powers_w[n - 1] = p;
    }
    a.n_active = static_cast<int>(used.size());
    const auto cap = capacity_of(a, profile, grid);
    a.capacity_bps = cap.capacity_bps;
    a.spectral_efficiency = cap.spectral_efficiency;
    return a;
}

std::vector<KSweepRow> k_sweep(const AllocationRequest& tmpl, const std::vector<double>& k_values) {
    if (k_values.empty()) throw ValidationError("k_sweep: no K values given");
    std::vector<KSweepRow> rows;
    for (double k : k_values) {
        AllocationRequest req = tmpl;
        req.k_threshold = k;
        const auto a = solve_waterfill(req);
        rows.push_back({k, a.n_active, a.capacity_bps, a.spectral_efficiency});
    }
    return rows;
}

Table allocation_table(const Allocation& alloc, const AllocationRequest& req) {
    Table t{"allocation", {"index", "f_n_hz", "alpha", "P_n_w", "I_n_w", "gamma2_w"}, {}};
    for (int n = 1; n <= req.grid.n_subcarriers; ++n) {
        t.add_row({cell(n), cell(req.grid.center(n)), cell(alloc.active.at(n - 1) ? 1 : 0),
                   cell(alloc.powers_w.at(n - 1)), cell(req.profile.interference_w.at(n - 1)),
                   cell(req.profile.gamma2(n))});
    }
    return t;
}

nlohmann::json allocation_summary(const Allocation& alloc) {
    return {{"water_level_w", alloc.water_level_w},
            {"capacity_bps", alloc.capacity_bps},
            {"spectral_efficiency", alloc.spectral_efficiency},
            {"n_active", alloc.n_active},
            {"K", alloc.k_threshold},
            {"threshold_ties", alloc.threshold_ties},
            {"active_indices", alloc.active_indices()}};
}

}  // namespace specshape
