#pragma once

#include <cstdint>
#include <random>

#include <json.hpp>

#include "specshape/allocator.hpp"

namespace specshape {

/// Random allocation problem on the standard 128-subcarrier, 1 MHz grid: I_n log-uniform over
/// [1e-22, 1e-10] W, K drawn from {0.5, 1, 3}, P_T log-uniform over [1e-17, 1e-12] W and the
/// noise density of a 290 K, 6 dB noise-figure receiver.
AllocationRequest random_request(std::mt19937_64& rng);

struct SolverComparison {
    int profiles = 0;
    int active_set_mismatches = 0;
    double max_power_gap = 0.0;  ///< max |P_solver - P_oracle| / P_T over all instances
    double seconds = 0.0;
};

/// Runs solve_waterfill and oracle_waterfill on `profiles` random instances.
SolverComparison compare_solvers(int profiles, std::uint64_t seed);

/// Solver/oracle comparison plus a noise-only BER calibration point; "passed" summarises both.
nlohmann::json run_selftest(int profiles, std::uint64_t seed);

}  // namespace specshape
