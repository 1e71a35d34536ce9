#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "specshape/config.hpp"
#include "specshape/table.hpp"

namespace specshape {

/// Figure datasets. Every bundle carries a manifest with the full config, its hash, the seed and
/// the figure parameters, which is enough to rebuild the tables exactly.
struct FigureBundle {
    std::string figure_id;  ///< psd, ber_curve, k_sweep_ber, k_sweep_capacity or allocation
    nlohmann::json manifest;
    std::vector<Table> tables;

    const Table& table(const std::string& name) const;
};

/// Composite PSD at the receiver for one interferer group: analytic interference, noise floor,
/// measured shaped OFDM and FBMC spectra on the configured resolution grid, plus the allocation.
FigureBundle make_psd_figure(const ReproConfig& cfg, const std::string& group, double k);

/// BER against Eb/N0 over ber.d_tx_rx_m: the shaped system at K = allocator.k_threshold and the
/// fixed-band baseline at every ber.flat_d_intf_rx_m, with the AWGN reference.
FigureBundle make_ber_figure(const ReproConfig& cfg, const std::string& group);

/// Shaped-system BER curves over ber.k_sweep_d_tx_rx_m for every K in allocator.k_values.
/// The summary table flags, per K, whether every point lies within 3 sigma of the AWGN curve.
FigureBundle make_k_sweep_ber_figure(const ReproConfig& cfg, const std::string& group);

/// Spectral efficiency against K at the capacity distances for every interferer group, the
/// computed fixed-band value, and the published reference with the ratio to it.
FigureBundle make_capacity_figure(const ReproConfig& cfg);

/// Allocation for one group and K at the link distances: allocation and interference tables.
FigureBundle make_allocation_bundle(const ReproConfig& cfg, const std::string& group, double k);

/// Regenerates a bundle from its manifest alone.
FigureBundle rebuild_from_manifest(const nlohmann::json& manifest);

/// UTC time as YYYYMMDDTHHMMSSZ.
std::string utc_timestamp();

/// Writes <root>/<figure_id>/<tag>/{<table>.csv, manifest.json}; returns the directory.
std::filesystem::path write_bundle(const FigureBundle& bundle, const std::filesystem::path& root,
                                   const std::string& tag);

/// Reads manifest.json from a bundle directory.
nlohmann::json read_manifest(const std::filesystem::path& dir);

}  // namespace specshape
