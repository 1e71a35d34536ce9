#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "specshape/ber.hpp"
#include "specshape/grid.hpp"
#include "specshape/link_budget.hpp"
#include "specshape/pulse_train.hpp"

namespace specshape {

/// A value of the TOML subset: number, string, boolean or a flat array of those.
struct ConfigValue {
    enum class Type { Number, String, Bool, Array };
    Type type = Type::Number;
    double number = 0.0;
    std::string text;  ///< string contents, or the literal spelling of a number
    bool boolean = false;
    std::vector<ConfigValue> items;

    double as_number(const std::string& where) const;
    std::int64_t as_integer(const std::string& where) const;
    std::uint64_t as_unsigned(const std::string& where) const;
    const std::string& as_string(const std::string& where) const;
    bool as_bool(const std::string& where) const;
    std::vector<double> as_numbers(const std::string& where) const;
};

/// section name ("grid", "interferers.1", ...) -> key -> value
using ConfigDocument = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses [section] headers, key = value lines and # comments. Duplicate keys are rejected.
ConfigDocument parse_document(const std::string& text, const std::string& source = "<config>");

ConfigValue parse_value(const std::string& text, const std::string& where);

/// Applies "section.key=value" overrides; the key is everything after the last dot.
void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides);

struct InterfererEntry {
    std::string group;  ///< scenarios select emitters by group, e.g. "dme" or "rect"
    PulseTrainSpec spec;
    bool operator==(const InterfererEntry&) const = default;
};

struct GridConfig {
    int n_subcarriers = 128;
    double bandwidth_hz = 1e6;
    double guard_fraction = 0.25;
};

struct LinkConfig {
    double d_tx_rx_m = 10e3;
    double d_intf_rx_m = 200e3;
    double carrier_freq_hz = 1e9;
    double tx_power_w = 1.0;
    double noise_temp_k = 290.0;
    double noise_figure_db = 6.0;
    double desired_gain_db = 0.0;
    double interferer_gain_db = 0.0;
};

struct AllocatorConfig {
    double k_threshold = 1.0;
    std::vector<double> k_values = {0.5, 1.0, 2.0, 3.0, 5.0};
};

struct BerConfig {
    std::uint64_t seed = 1;
    StoppingRule rule;
    int oversampling = 4;
    int flat_oversampling = 8;
    InterferenceMode mode = InterferenceMode::TimeDomain;
    int threads = 1;
    bool cp_in_eb = false;
    std::vector<double> d_tx_rx_m = {180e3, 156e3, 132e3, 108e3, 84e3, 60e3};
    double d_intf_rx_m = 200e3;
    std::vector<double> flat_d_intf_rx_m = {20e3, 60e3};
    std::vector<double> k_sweep_d_tx_rx_m = {180e3, 120e3, 60e3};
};

struct CapacityConfig {
    double d_tx_rx_m = 60e3;
    double d_intf_rx_m = 60e3;
    double flat_reference = 6.04;  ///< published reference value, reported alongside the computed one
};

struct PsdConfig {
    double duration_s = 0.1;
    double resolution_hz = 100.0;
    int oversampling = 4;
    std::uint64_t seed = 7;
};

struct ReproConfig {
    GridConfig grid;
    LinkConfig link;
    std::vector<InterfererEntry> interferers;
    AllocatorConfig allocator;
    BerConfig ber;
    CapacityConfig capacity;
    PsdConfig psd;

    void validate() const;
    SubcarrierGrid make_grid() const;
    /// Scenario with the interferers of one group (all interferers when group is empty).
    LinkScenario scenario(const std::string& group) const;
    std::vector<std::string> groups() const;

    nlohmann::json to_json() const;
    static ReproConfig from_json(const nlohmann::json& j);
    /// FNV-1a of the canonical JSON dump, as 16 hex digits.
    std::string hash() const;
};

/// Builds a typed config; unknown sections or keys raise ValidationError.
ReproConfig config_from_document(const ConfigDocument& doc);

/// Reads, applies overrides, converts and validates. A missing file raises ValidationError
/// naming the path.
ReproConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

std::string fnv1a_hex(const std::string& data);

}  // namespace specshape
