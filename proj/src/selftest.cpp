#include "specshape/selftest.hpp"

#include <chrono>
#include <cmath>

#include "specshape/ber.hpp"
#include "specshape/link_budget.hpp"
#include "specshape/rng.hpp"

namespace specshape {

AllocationRequest random_request(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    static const double k_choices[] = {0.5, 1.0, 3.0};
    AllocationRequest req;
    req.grid = build_grid(128, 1e6);
    InterferenceProfile p;
    p.interference_w.resize(128);
    for (auto& i : p.interference_w) i = std::pow(10.0, -22.0 + 12.0 * u(rng));
    req.profile = with_noise(std::move(p), req.grid, noise_density(290.0, 6.0));
    req.k_threshold = k_choices[std::uniform_int_distribution<int>(0, 2)(rng)];
    req.total_power_w = std::pow(10.0, -17.0 + 5.0 * u(rng));
    return req;
}

SolverComparison compare_solvers(int profiles, std::uint64_t seed) {
    SolverComparison out;
    const auto start = std::chrono::steady_clock::now();
    auto rng = make_stream(seed);
    for (int i = 0; i < profiles; ++i) {
        const auto req = random_request(rng);
        const auto a = solve_waterfill(req);
        const auto b = oracle_waterfill(req);
        if (a.active != b.active) ++out.active_set_mismatches;
        for (std::size_t n = 0; n < a.powers_w.size(); ++n) {
            out.max_power_gap = std::max(out.max_power_gap, std::abs(a.powers_w[n] - b.powers_w[n]) / req.total_power_w);
        }
        ++out.profiles;
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

nlohmann::json run_selftest(int profiles, std::uint64_t seed) {
    const auto cmp = compare_solvers(profiles, seed);
    const bool solver_ok = cmp.active_set_mismatches == 0 && cmp.max_power_gap <= 1e-9;

    // Noise-only calibration: flat allocation on the standard grid at about 6 dB Eb/N0.
    LinkScenario s;
    s.d_tx_rx_m = 100e3;
    const auto grid = build_grid(128, 1e6);
    const double n0 = noise_density(s.noise_temp_k, s.noise_figure_db);
    BerSystem sys;
    sys.label = "calibration";
    sys.grid = grid;
    sys.layout = layout_for(grid, 1);
    sys.profile = with_noise(integrate_interference(grid, {}), grid, n0);
    const double p_rx = std::pow(10.0, 0.6) * 62 * 4 * grid.spacing_hz * n0;
    sys.allocation = flat_allocation(grid, sys.profile, p_rx);
    sys.noise_density_w_per_hz = n0;
    sys.ebn0_db = ebn0_db(p_rx, sys.allocation.n_active, grid.spacing_hz, n0, 4);
    const auto point = run_ber_point(sys, StoppingRule{}, seed, 0);

    return {{"solver_vs_oracle",
             {{"profiles", cmp.profiles},
              {"active_set_mismatches", cmp.active_set_mismatches},
              {"max_power_gap_rel", cmp.max_power_gap},
              {"seconds", cmp.seconds},
              {"passed", solver_ok}}},
            {"awgn_calibration",
             {{"ebn0_db", point.ebn0_db},
              {"ber", point.ber},
              {"theory", point.theory},
              {"bits", point.bits},
              {"errors", point.errors},
              {"passed", point.within_3sigma()}}},
            {"passed", solver_ok && point.within_3sigma()}};
}

}  // namespace specshape
