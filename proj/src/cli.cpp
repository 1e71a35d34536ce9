#include "specshape/cli.hpp"

#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specshape/config.hpp"
#include "specshape/errors.hpp"
#include "specshape/report.hpp"
#include "specshape/selftest.hpp"

namespace specshape::cli {

namespace {

struct Options {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string tag;
    std::string interferer = "dme";
    std::optional<double> k;
    bool k_sweep = false;
    int profiles = 1000;
};

void add_common(CLI::App* cmd, Options& o, bool needs_config) {
    auto* c = cmd->add_option("--config,-c", o.config_path, "scenario config file");
    if (needs_config) c->required();
    cmd->add_option("--set", o.overrides, "section.key=value override, applied after the file")->take_all();
    cmd->add_option("--seed", o.seed, "overrides ber.seed and psd.seed");
    cmd->add_option("--out", o.out_dir, "output root (default $SPECSHAPE_OUT_DIR or ./out)");
    cmd->add_option("--tag", o.tag, "output sub-directory name (default: UTC timestamp)");
}

void emit_error(std::ostream& err, const std::string& kind, const std::string& message, const Options& o,
                std::optional<int> index = std::nullopt) {
    nlohmann::json j{{"error", {{"kind", kind}, {"message", message}}}};
    if (!o.config_path.empty()) j["error"]["config"] = o.config_path;
    if (index) j["error"]["subcarrier_index"] = *index;
    err << j.dump() << '\n';
}

ReproConfig load(const Options& o) {
    auto cfg = load_config(o.config_path, o.overrides);
    if (o.seed) {
        cfg.ber.seed = *o.seed;
        cfg.psd.seed = *o.seed;
    }
    return cfg;
}

nlohmann::json finish(const FigureBundle& b, const Options& o) {
    const std::string root = o.out_dir.empty() ? default_out_dir() : o.out_dir;
    const auto dir = write_bundle(b, root, o.tag.empty() ? utc_timestamp() : o.tag);
    nlohmann::json j{{"figure_id", b.figure_id}, {"output_dir", dir.string()}, {"config_hash", b.manifest.at("config_hash")}};
    if (b.manifest.contains("summary")) j["summary"] = b.manifest.at("summary");
    return j;
}

}  // namespace

const char* default_out_dir() {
    const char* env = std::getenv("SPECSHAPE_OUT_DIR");
    return (env && *env) ? env : "out";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spectrally shaped multicarrier toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* psd = app.add_subcommand("psd", "receiver PSD composite for one interferer group");
    add_common(psd, o, true);
    psd->add_option("--interferer", o.interferer, "interferer group");
    psd->add_option("--K", o.k, "threshold factor (default allocator.k_threshold)");

    auto* allocate = app.add_subcommand("allocate", "solve the allocation for one interferer group");
    add_common(allocate, o, true);
    allocate->add_option("--interferer", o.interferer, "interferer group");
    allocate->add_option("--K", o.k, "threshold factor (default allocator.k_threshold)");

    auto* ber = app.add_subcommand("ber", "Monte-Carlo BER curves");
    add_common(ber, o, true);
    ber->add_option("--interferer", o.interferer, "interferer group");
    ber->add_flag("--k-sweep", o.k_sweep, "sweep allocator.k_values instead of the single-K curve");

    auto* capacity = app.add_subcommand("capacity", "spectral efficiency against K");
    add_common(capacity, o, true);

    auto* selftest = app.add_subcommand("selftest", "solver/oracle comparison and AWGN calibration");
    selftest->add_option("--profiles", o.profiles, "random allocation problems")->check(CLI::PositiveNumber);
    selftest->add_option("--seed", o.seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        emit_error(err, "usage", e.what(), o);
        return 1;
    }

    try {
        nlohmann::json result;
        if (selftest->parsed()) {
            result = run_selftest(o.profiles, o.seed.value_or(1));
            out << result.dump(2) << '\n';
            return result.at("passed").get<bool>() ? 0 : 2;
        }
        const auto cfg = load(o);
        if (psd->parsed()) {
            result = finish(make_psd_figure(cfg, o.interferer, o.k.value_or(cfg.allocator.k_threshold)), o);
        } else if (allocate->parsed()) {
            result = finish(make_allocation_bundle(cfg, o.interferer, o.k.value_or(cfg.allocator.k_threshold)), o);
            const auto& s = result.at("summary");
            if (s.at("threshold_ties").get<int>() > 0) {
                result["note"] = "some subcarriers sit exactly on the K threshold and were excluded";
            }
        } else if (ber->parsed()) {
            result = finish(o.k_sweep ? make_k_sweep_ber_figure(cfg, o.interferer) : make_ber_figure(cfg, o.interferer), o);
        } else if (capacity->parsed()) {
            result = finish(make_capacity_figure(cfg), o);
        }
        out << result.dump(2) << '\n';
        return 0;
    } catch (const NumericalError& e) {
        emit_error(err, "numerical", e.what(), o, e.index());
        return 2;
    } catch (const ValidationError& e) {
        emit_error(err, "validation", e.what(), o);
        return 1;
    } catch (const std::exception& e) {
        emit_error(err, "internal", e.what(), o);
        return 2;
    }
}

}  // namespace specshape::cli
