#include "specshape/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <limits>

#include "specshape/allocator.hpp"
#include "specshape/ber.hpp"
#include "specshape/errors.hpp"
#include "specshape/qam.hpp"
#include "specshape/rng.hpp"
#include "specshape/waveform.hpp"

namespace specshape {

namespace {

nlohmann::json base_manifest(const std::string& figure_id, const ReproConfig& cfg, nlohmann::json params,
                             std::uint64_t seed) {
    return {{"figure_id", figure_id},
            {"params", std::move(params)},
            {"seed", seed},
            {"config", cfg.to_json()},
            {"config_hash", cfg.hash()}};
}

cvec random_qam_blocks(int n_blocks, int n_subcarriers, std::uint64_t seed) {
    auto rng = make_stream(seed);
    cvec out(static_cast<std::size_t>(n_blocks) * n_subcarriers);
    for (auto& s : out) s = qam16::map(static_cast<unsigned>(rng() & 15u));
    return out;
}

LinkScenario with_distances(LinkScenario s, double d_tx, double d_intf) {
    s.d_tx_rx_m = d_tx;
    s.d_intf_rx_m = d_intf;
    return s;
}

std::string format_k(double k) {
    return "K=" + format_double(k);
}

}  // namespace

const Table& FigureBundle::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) return t;
    }
    throw ValidationError("bundle " + figure_id + " has no table '" + name + "'");
}

FigureBundle make_allocation_bundle(const ReproConfig& cfg, const std::string& group, double k) {
    const auto grid = cfg.make_grid();
    const auto s = cfg.scenario(group);
    const auto req = scenario_request(s, grid, k);
    const auto alloc = solve_waterfill(req);

    FigureBundle b;
    b.figure_id = "allocation";
    b.manifest = base_manifest(b.figure_id, cfg, {{"group", group}, {"K", k}}, 0);
    auto summary = allocation_summary(alloc);
    summary["group"] = group;
    summary["total_power_w"] = req.total_power_w;
    summary["noise_per_subcarrier_w"] = req.profile.noise_per_subcarrier_w;
    if (!alloc.empty()) summary["ebn0_db"] = ebn0_db(s, alloc, grid, qam16::kBitsPerSymbol);
    b.manifest["summary"] = summary;
    b.tables.push_back(allocation_table(alloc, req));
    b.tables.push_back(profile_table(grid, req.profile));
    return b;
}

FigureBundle make_psd_figure(const ReproConfig& cfg, const std::string& group, double k) {
    const auto grid = cfg.make_grid();
    const auto s = cfg.scenario(group);
    const auto req = scenario_request(s, grid, k);
    const auto alloc = solve_waterfill(req);
    const auto weights = weights_from_allocation(alloc);
    const auto layout = layout_for(grid, cfg.psd.oversampling, 0.0);
    const double fs = layout.sample_rate();
    const int nfft = nfft_for_resolution(fs, cfg.psd.resolution_hz);
    const int m = layout.fft_size();
    const auto wanted = std::max<long long>(std::llround(cfg.psd.duration_s * fs), 8LL * nfft);
    const int n_blocks = static_cast<int>((wanted + m - 1) / m);

    // Shaped OFDM: consecutive blocks without cyclic prefix.
    const auto symbols = random_qam_blocks(n_blocks, grid.n_subcarriers, stream_key(cfg.psd.seed, 1));
    OfdmModem modem(layout);
    cvec ofdm(static_cast<std::size_t>(n_blocks) * m);
    for (int blk = 0; blk < n_blocks; ++blk) {
        modem.modulate(std::span(symbols).subspan(static_cast<std::size_t>(blk) * grid.n_subcarriers, grid.n_subcarriers),
                       weights, std::span(ofdm).subspan(static_cast<std::size_t>(blk) * m, m));
    }
    // Shaped FBMC: the same number of complex symbols, OQAM-staggered.
    const auto stream = oqam_stagger(
        random_qam_blocks(n_blocks, grid.n_subcarriers, stream_key(cfg.psd.seed, 2)), grid.n_subcarriers);
    const auto fbmc = fbmc_synthesize(stream, weights, PrototypeFilter::phydyas(m), layout);

    const auto ofdm_psd = measure_psd(ofdm, fs, nfft);
    const auto fbmc_psd = measure_psd(fbmc, fs, nfft);
    const auto psds = receiver_psds(s);
    const double n0 = req.profile.noise_density_w_per_hz;

    Table t{"psd", {"freq_hz", "interference_w_per_hz", "noise_w_per_hz", "ss_ofdm_w_per_hz", "ss_fbmc_w_per_hz"}, {}};
    t.rows.reserve(ofdm_psd.freq_hz.size());
    for (std::size_t i = 0; i < ofdm_psd.freq_hz.size(); ++i) {
        const double f = ofdm_psd.freq_hz[i];
        double interference = 0.0;
        for (const auto& p : psds) interference += p(f);
        t.rows.push_back({cell(f), cell(interference), cell(n0), cell(ofdm_psd.density[i]), cell(fbmc_psd.density[i])});
    }

    FigureBundle b;
    b.figure_id = "psd";
    b.manifest = base_manifest(b.figure_id, cfg, {{"group", group}, {"K", k}}, cfg.psd.seed);
    auto summary = allocation_summary(alloc);
    summary["sample_rate_hz"] = fs;
    summary["nfft"] = nfft;
    summary["ofdm_mean_power_w"] = ofdm_psd.integral();
    summary["fbmc_mean_power_w"] = fbmc_psd.integral();
    summary["total_power_w"] = req.total_power_w;
    b.manifest["summary"] = summary;
    b.tables.push_back(std::move(t));
    b.tables.push_back(allocation_table(alloc, req));
    return b;
}

FigureBundle make_ber_figure(const ReproConfig& cfg, const std::string& group) {
    const auto grid = cfg.make_grid();
    const auto tmpl = cfg.scenario(group);
    const double k = cfg.allocator.k_threshold;

    auto shaped_tmpl = tmpl;
    shaped_tmpl.d_intf_rx_m = cfg.ber.d_intf_rx_m;
    auto points = run_ber_curve(
        shaped_tmpl, cfg.ber.d_tx_rx_m,
        [&](const LinkScenario& s) { return make_shaped_system(s, grid, k, cfg.ber.oversampling, cfg.ber.mode); },
        cfg.ber.rule, cfg.ber.seed, cfg.ber.threads);

    for (std::size_t j = 0; j < cfg.ber.flat_d_intf_rx_m.size(); ++j) {
        auto flat_tmpl = tmpl;
        flat_tmpl.d_intf_rx_m = cfg.ber.flat_d_intf_rx_m[j];
        auto flat = run_ber_curve(
            flat_tmpl, cfg.ber.d_tx_rx_m,
            [&](const LinkScenario& s) {
                return make_flat_system(s, cfg.ber.flat_oversampling, cfg.ber.mode, cfg.ber.cp_in_eb);
            },
            cfg.ber.rule, stream_key(cfg.ber.seed, 1000 + j), cfg.ber.threads);
        points.insert(points.end(), flat.begin(), flat.end());
    }

    FigureBundle b;
    b.figure_id = "ber_curve";
    b.manifest = base_manifest(b.figure_id, cfg, {{"group", group}}, cfg.ber.seed);
    b.tables.push_back(ber_table(points));
    return b;
}

FigureBundle make_k_sweep_ber_figure(const ReproConfig& cfg, const std::string& group) {
    const auto grid = cfg.make_grid();
    auto tmpl = cfg.scenario(group);
    tmpl.d_intf_rx_m = cfg.ber.d_intf_rx_m;

    std::vector<BerPoint> all;
    Table summary{"summary", {"K", "n_active", "points", "attains_awgn", "max_abs_z"}, {}};
    nlohmann::json attaining = nlohmann::json::array();
    for (std::size_t ki = 0; ki < cfg.allocator.k_values.size(); ++ki) {
        const double k = cfg.allocator.k_values[ki];
        const auto probe = solve_waterfill(scenario_request(tmpl, grid, k));
        if (probe.empty()) {
            summary.add_row({cell(k), cell(0), cell(0), cell(0), cell(std::numeric_limits<double>::quiet_NaN())});
            continue;
        }
        auto points = run_ber_curve(
            tmpl, cfg.ber.k_sweep_d_tx_rx_m,
            [&](const LinkScenario& s) {
                auto sys = make_shaped_system(s, grid, k, cfg.ber.oversampling, cfg.ber.mode);
                sys.label = format_k(k);
                return sys;
            },
            cfg.ber.rule, stream_key(cfg.ber.seed, 2000 + ki), cfg.ber.threads);
        bool ok = true;
        double worst = 0.0;
        for (const auto& p : points) {
            ok = ok && p.within_3sigma();
            const double sigma = std::sqrt(p.theory * (1.0 - p.theory) / static_cast<double>(p.bits));
            worst = std::max(worst, std::abs(p.ber - p.theory) / sigma);
        }
        if (ok) attaining.push_back(k);
        summary.add_row({cell(k), cell(probe.n_active), cell(static_cast<int>(points.size())), cell(ok ? 1 : 0),
                         cell(worst)});
        all.insert(all.end(), points.begin(), points.end());
    }

    FigureBundle b;
    b.figure_id = "k_sweep_ber";
    b.manifest = base_manifest(b.figure_id, cfg, {{"group", group}}, cfg.ber.seed);
    b.manifest["summary"] = {{"attaining_k", attaining},
                             {"minimal_attaining_k", attaining.empty() ? nlohmann::json(nullptr) : attaining.front()}};
    b.tables.push_back(ber_table(all));
    b.tables.push_back(std::move(summary));
    return b;
}

FigureBundle make_capacity_figure(const ReproConfig& cfg) {
    const auto grid = cfg.make_grid();
    const double reference = cfg.capacity.flat_reference;
    Table cap{"capacity", {"group", "K", "n_active", "capacity_bps", "spectral_efficiency", "ratio_to_reference"}, {}};
    Table ref{"reference", {"label", "group", "spectral_efficiency", "ratio_to_reference"}, {}};

    for (const auto& group : cfg.groups()) {
        const auto s = with_distances(cfg.scenario(group), cfg.capacity.d_tx_rx_m, cfg.capacity.d_intf_rx_m);
        const auto req = scenario_request(s, grid, cfg.allocator.k_threshold);
        for (const auto& row : k_sweep(req, cfg.allocator.k_values)) {
            cap.add_row({group, cell(row.k), cell(row.n_active), cell(row.capacity_bps), cell(row.spectral_efficiency),
                         cell(row.spectral_efficiency / reference)});
        }
        const auto flat_grid = ldacs_grid();
        const auto flat = flat_allocation(flat_grid, scenario_profile(s, flat_grid), receiver_powers(s).signal_w);
        ref.add_row({"flat_computed", group, cell(flat.spectral_efficiency), cell(flat.spectral_efficiency / reference)});
    }
    ref.add_row({"flat_published", "", cell(reference), cell(1.0)});

    FigureBundle b;
    b.figure_id = "k_sweep_capacity";
    b.manifest = base_manifest(b.figure_id, cfg, nlohmann::json::object(), 0);
    b.tables.push_back(std::move(cap));
    b.tables.push_back(std::move(ref));
    return b;
}

FigureBundle rebuild_from_manifest(const nlohmann::json& manifest) {
    const auto cfg = ReproConfig::from_json(manifest.at("config"));
    if (manifest.contains("config_hash") && manifest.at("config_hash").get<std::string>() != cfg.hash()) {
        throw ValidationError("manifest config hash does not match its embedded config");
    }
    const auto id = manifest.at("figure_id").get<std::string>();
    const auto& params = manifest.at("params");
    if (id == "psd") return make_psd_figure(cfg, params.at("group").get<std::string>(), params.at("K").get<double>());
    if (id == "allocation") {
        return make_allocation_bundle(cfg, params.at("group").get<std::string>(), params.at("K").get<double>());
    }
    if (id == "ber_curve") return make_ber_figure(cfg, params.at("group").get<std::string>());
    if (id == "k_sweep_ber") return make_k_sweep_ber_figure(cfg, params.at("group").get<std::string>());
    if (id == "k_sweep_capacity") return make_capacity_figure(cfg);
    throw ValidationError("unknown figure id '" + id + "' in manifest");
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

std::filesystem::path write_bundle(const FigureBundle& bundle, const std::filesystem::path& root,
                                   const std::string& tag) {
    const auto dir = root / bundle.figure_id / tag;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& t : bundle.tables) {
        std::ofstream out(dir / (t.name + ".csv"), std::ios::binary);
        out << t.to_csv();
        if (!out) throw ValidationError("failed writing " + (dir / (t.name + ".csv")).string());
    }
    std::ofstream man(dir / "manifest.json", std::ios::binary);
    man << bundle.manifest.dump(2) << '\n';
    if (!man) throw ValidationError("failed writing " + (dir / "manifest.json").string());
    return dir;
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw ValidationError("no manifest.json in " + dir.string());
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed manifest in " + dir.string() + ": " + e.what());
    }
}

}  // namespace specshape
