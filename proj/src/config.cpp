#include "specshape/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "specshape/errors.hpp"

namespace specshape {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Drops a trailing # comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
}

std::vector<std::string> split_array(const std::string& body, const std::string& where) {
    std::vector<std::string> out;
    std::string cur;
    bool in_string = false;
    for (char c : body) {
        if (c == '"') in_string = !in_string;
        if (c == ',' && !in_string) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (in_string) throw ValidationError(where + ": unterminated string in array");
    if (!trim(cur).empty()) out.push_back(trim(cur));
    for (const auto& item : out) {
        if (item.empty()) throw ValidationError(where + ": empty array element");
    }
    return out;
}

using Section = std::map<std::string, ConfigValue>;

class SectionReader {
public:
    SectionReader(const Section& section, std::string name) : section_(section), name_(std::move(name)) {}

    template <typename F>
    void read(const std::string& key, F&& apply) {
        seen_.insert(key);
        auto it = section_.find(key);
        if (it != section_.end()) apply(it->second, name_ + "." + key);
    }
    void number(const std::string& key, double& out) {
        read(key, [&](const ConfigValue& v, const std::string& w) { out = v.as_number(w); });
    }
    void integer(const std::string& key, int& out) {
        read(key, [&](const ConfigValue& v, const std::string& w) { out = static_cast<int>(v.as_integer(w)); });
    }
    void count(const std::string& key, long long& out) {
        read(key, [&](const ConfigValue& v, const std::string& w) { out = v.as_integer(w); });
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        read(key, [&](const ConfigValue& v, const std::string& w) { out = v.as_numbers(w); });
    }
    void finish() const {
        for (const auto& [key, value] : section_) {
            if (!seen_.count(key)) throw ValidationError("unknown config key '" + name_ + "." + key + "'");
        }
    }

private:
    const Section& section_;
    std::string name_;
    std::set<std::string> seen_;
};

std::string value_to_block_string(const ConfigValue& v, const std::string& where) {
    if (v.type == ConfigValue::Type::Number) return v.text;
    if (v.type == ConfigValue::Type::String) return v.text;
    throw ValidationError(where + ": expected a number or string");
}

nlohmann::json spec_to_json(const PulseTrainSpec& s) {
    return {{"kind", to_string(s.kind)},       {"peak_power_w", s.peak_power_w},
            {"beta", s.beta},                  {"delta_t_s", s.delta_t_s},
            {"pulse_width_s", s.pulse_width_s}, {"rate_ppps", s.rate_ppps},
            {"offset_hz", s.center_offset_hz}};
}

PulseTrainSpec spec_from_json(const nlohmann::json& j) {
    PulseTrainSpec s;
    s.kind = pulse_kind_from_string(j.at("kind").get<std::string>());
    s.peak_power_w = j.at("peak_power_w").get<double>();
    s.beta = j.at("beta").get<double>();
    s.delta_t_s = j.at("delta_t_s").get<double>();
    s.pulse_width_s = j.at("pulse_width_s").get<double>();
    s.rate_ppps = j.at("rate_ppps").get<double>();
    s.center_offset_hz = j.at("offset_hz").get<double>();
    return s;
}

}  // namespace

double ConfigValue::as_number(const std::string& where) const {
    if (type != Type::Number) throw ValidationError(where + ": expected a number");
    return number;
}

std::int64_t ConfigValue::as_integer(const std::string& where) const {
    const double v = as_number(where);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ValidationError(where + ": expected an integer");
    return static_cast<std::int64_t>(v);
}

std::uint64_t ConfigValue::as_unsigned(const std::string& where) const {
    if (type != Type::Number) throw ValidationError(where + ": expected an unsigned integer");
    std::string digits;
    for (char c : text) {
        if (c != '_') digits += c;
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        throw ValidationError(where + ": expected an unsigned integer, got " + text);
    }
    try {
        return std::stoull(digits);
    } catch (const std::exception&) {
        throw ValidationError(where + ": integer out of range: " + text);
    }
}

const std::string& ConfigValue::as_string(const std::string& where) const {
    if (type != Type::String) throw ValidationError(where + ": expected a string");
    return text;
}

bool ConfigValue::as_bool(const std::string& where) const {
    if (type != Type::Bool) throw ValidationError(where + ": expected true or false");
    return boolean;
}

std::vector<double> ConfigValue::as_numbers(const std::string& where) const {
    if (type == Type::Number) return {number};
    if (type != Type::Array) throw ValidationError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& item : items) out.push_back(item.as_number(where));
    return out;
}

ConfigValue parse_value(const std::string& raw, const std::string& where) {
    const std::string text = trim(raw);
    ConfigValue v;
    if (text.empty()) throw ValidationError(where + ": missing value");
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') throw ValidationError(where + ": unterminated string");
        v.type = ConfigValue::Type::String;
        v.text = text.substr(1, text.size() - 2);
        return v;
    }
    if (text == "true" || text == "false") {
        v.type = ConfigValue::Type::Bool;
        v.boolean = text == "true";
        return v;
    }
    if (text.front() == '[') {
        if (text.back() != ']') throw ValidationError(where + ": unterminated array");
        v.type = ConfigValue::Type::Array;
        for (const auto& item : split_array(text.substr(1, text.size() - 2), where)) {
            auto element = parse_value(item, where);
            if (element.type == ConfigValue::Type::Array) throw ValidationError(where + ": nested arrays are not supported");
            v.items.push_back(std::move(element));
        }
        return v;
    }
    std::string digits;
    for (char c : text) {
        if (c != '_') digits += c;
    }
    std::size_t used = 0;
    try {
        v.number = std::stod(digits, &used);
    } catch (const std::exception&) {
        throw ValidationError(where + ": cannot parse value '" + text + "'");
    }
    if (used != digits.size() || !std::isfinite(v.number)) {
        throw ValidationError(where + ": cannot parse value '" + text + "'");
    }
    v.type = ConfigValue::Type::Number;
    v.text = digits;
    return v;
}

ConfigDocument parse_document(const std::string& text, const std::string& source) {
    ConfigDocument doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string where = source + ":" + std::to_string(line_no);
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ValidationError(where + ": malformed section header");
            section = trim(body.substr(1, body.size() - 2));
            if (!valid_name(section)) throw ValidationError(where + ": invalid section name '" + section + "'");
            if (doc.count(section)) throw ValidationError(where + ": duplicate section [" + section + "]");
            doc[section];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ValidationError(where + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        if (!valid_name(key) || key.find('.') != std::string::npos) {
            throw ValidationError(where + ": invalid key '" + key + "'");
        }
        if (section.empty()) throw ValidationError(where + ": key '" + key + "' outside any section");
        auto& sec = doc[section];
        if (sec.count(key)) throw ValidationError(where + ": duplicate key '" + key + "'");
        sec[key] = parse_value(body.substr(eq + 1), where);
    }
    return doc;
}

void apply_overrides(ConfigDocument& doc, const std::vector<std::string>& overrides) {
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ValidationError("override '" + o + "' is not section.key=value");
        const std::string path = trim(o.substr(0, eq));
        const auto dot = path.rfind('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == path.size()) {
            throw ValidationError("override '" + o + "' is not section.key=value");
        }
        doc[path.substr(0, dot)][path.substr(dot + 1)] = parse_value(o.substr(eq + 1), "override " + path);
    }
}

ReproConfig config_from_document(const ConfigDocument& doc) {
    ReproConfig c;
    static const std::set<std::string> known = {"grid", "link", "allocator", "ber", "capacity", "psd"};
    std::vector<std::pair<std::string, const Section*>> interferer_sections;
    for (const auto& [name, section] : doc) {
        if (name.rfind("interferers.", 0) == 0) {
            interferer_sections.emplace_back(name.substr(12), &section);
        } else if (!known.count(name)) {
            throw ValidationError("unknown config section [" + name + "]");
        }
    }
    auto section = [&doc](const std::string& name) -> const Section& {
        static const Section empty;
        auto it = doc.find(name);
        return it == doc.end() ? empty : it->second;
    };

    {
        SectionReader r(section("grid"), "grid");
        r.integer("n_subcarriers", c.grid.n_subcarriers);
        r.number("bandwidth_hz", c.grid.bandwidth_hz);
        r.number("guard_fraction", c.grid.guard_fraction);
        r.finish();
    }
    {
        SectionReader r(section("link"), "link");
        r.number("d_tx_rx_m", c.link.d_tx_rx_m);
        r.number("d_intf_rx_m", c.link.d_intf_rx_m);
        r.number("carrier_freq_hz", c.link.carrier_freq_hz);
        r.number("tx_power_w", c.link.tx_power_w);
        r.number("noise_temp_k", c.link.noise_temp_k);
        r.number("noise_figure_db", c.link.noise_figure_db);
        r.number("desired_gain_db", c.link.desired_gain_db);
        r.number("interferer_gain_db", c.link.interferer_gain_db);
        r.finish();
    }
    {
        SectionReader r(section("allocator"), "allocator");
        r.number("k_threshold", c.allocator.k_threshold);
        r.numbers("k_values", c.allocator.k_values);
        r.finish();
    }
    {
        SectionReader r(section("ber"), "ber");
        r.read("seed", [&](const ConfigValue& v, const std::string& w) { c.ber.seed = v.as_unsigned(w); });
        r.count("min_bits", c.ber.rule.min_bits);
        r.count("min_errors", c.ber.rule.min_errors);
        r.count("max_bits", c.ber.rule.max_bits);
        r.integer("batch_symbols", c.ber.rule.batch_symbols);
        r.integer("oversampling", c.ber.oversampling);
        r.integer("flat_oversampling", c.ber.flat_oversampling);
        r.read("mode", [&](const ConfigValue& v, const std::string& w) {
            c.ber.mode = interference_mode_from_string(v.as_string(w));
        });
        r.integer("threads", c.ber.threads);
        r.read("cp_in_eb", [&](const ConfigValue& v, const std::string& w) { c.ber.cp_in_eb = v.as_bool(w); });
        r.numbers("d_tx_rx_m", c.ber.d_tx_rx_m);
        r.number("d_intf_rx_m", c.ber.d_intf_rx_m);
        r.numbers("flat_d_intf_rx_m", c.ber.flat_d_intf_rx_m);
        r.numbers("k_sweep_d_tx_rx_m", c.ber.k_sweep_d_tx_rx_m);
        r.finish();
    }
    {
        SectionReader r(section("capacity"), "capacity");
        r.number("d_tx_rx_m", c.capacity.d_tx_rx_m);
        r.number("d_intf_rx_m", c.capacity.d_intf_rx_m);
        r.number("flat_reference", c.capacity.flat_reference);
        r.finish();
    }
    {
        SectionReader r(section("psd"), "psd");
        r.number("duration_s", c.psd.duration_s);
        r.number("resolution_hz", c.psd.resolution_hz);
        r.integer("oversampling", c.psd.oversampling);
        r.read("seed", [&](const ConfigValue& v, const std::string& w) { c.psd.seed = v.as_unsigned(w); });
        r.finish();
    }

    // Numeric ids sort numerically so that [interferers.10] follows [interferers.9].
    std::stable_sort(interferer_sections.begin(), interferer_sections.end(), [](const auto& a, const auto& b) {
        const bool an = !a.first.empty() && std::all_of(a.first.begin(), a.first.end(), ::isdigit);
        const bool bn = !b.first.empty() && std::all_of(b.first.begin(), b.first.end(), ::isdigit);
        if (an && bn && a.first.size() != b.first.size()) return a.first.size() < b.first.size();
        return a.first < b.first;
    });
    for (const auto& [id, sec] : interferer_sections) {
        const std::string where = "interferers." + id;
        InterfererEntry e;
        std::map<std::string, std::string> block;
        for (const auto& [key, value] : *sec) {
            if (key == "group") {
                e.group = value.as_string(where + ".group");
            } else {
                block[key] = value_to_block_string(value, where + "." + key);
            }
        }
        try {
            e.spec = PulseTrainSpec::from_block(block);
        } catch (const ValidationError& err) {
            throw ValidationError(where + ": " + err.what());
        }
        if (e.group.empty()) e.group = to_string(e.spec.kind);
        c.interferers.push_back(std::move(e));
    }
    c.validate();
    return c;
}

void ReproConfig::validate() const {
    make_grid();
    for (const auto& g : groups()) scenario(g).validate();
    if (interferers.empty()) scenario("").validate();
    if (!(allocator.k_threshold > 0.0)) throw ValidationError("allocator.k_threshold must be positive");
    if (allocator.k_values.empty()) throw ValidationError("allocator.k_values must not be empty");
    for (double k : allocator.k_values) {
        if (!(k > 0.0)) throw ValidationError("allocator.k_values must be positive");
    }
    ber.rule.validate();
    if (ber.oversampling < 1 || ber.flat_oversampling < 1) throw ValidationError("ber oversampling must be >= 1");
    if (ber.threads < 1) throw ValidationError("ber.threads must be >= 1");
    auto positive = [](const std::vector<double>& v, const char* name) {
        for (double d : v) {
            if (!(d > 0.0)) throw ValidationError(std::string(name) + " entries must be positive");
        }
    };
    positive(ber.d_tx_rx_m, "ber.d_tx_rx_m");
    positive(ber.flat_d_intf_rx_m, "ber.flat_d_intf_rx_m");
    positive(ber.k_sweep_d_tx_rx_m, "ber.k_sweep_d_tx_rx_m");
    if (!(ber.d_intf_rx_m > 0.0)) throw ValidationError("ber.d_intf_rx_m must be positive");
    if (!(capacity.d_tx_rx_m > 0.0) || !(capacity.d_intf_rx_m > 0.0)) {
        throw ValidationError("capacity distances must be positive");
    }
    if (!(psd.duration_s > 0.0) || !(psd.resolution_hz > 0.0) || psd.oversampling < 1) {
        throw ValidationError("psd settings must be positive");
    }
}

SubcarrierGrid ReproConfig::make_grid() const {
    return build_grid(grid.n_subcarriers, grid.bandwidth_hz, grid.guard_fraction);
}

std::vector<std::string> ReproConfig::groups() const {
    std::vector<std::string> out;
    for (const auto& e : interferers) {
        if (std::find(out.begin(), out.end(), e.group) == out.end()) out.push_back(e.group);
    }
    return out;
}

LinkScenario ReproConfig::scenario(const std::string& group) const {
    LinkScenario s;
    s.d_tx_rx_m = link.d_tx_rx_m;
    s.d_intf_rx_m = link.d_intf_rx_m;
    s.carrier_freq_hz = link.carrier_freq_hz;
    s.tx_power_w = link.tx_power_w;
    s.noise_temp_k = link.noise_temp_k;
    s.noise_figure_db = link.noise_figure_db;
    s.desired_gain_db = link.desired_gain_db;
    s.interferer_gain_db = link.interferer_gain_db;
    bool found = group.empty();
    for (const auto& e : interferers) {
        if (group.empty() || e.group == group) {
            s.interferers.push_back(e.spec);
            found = true;
        }
    }
    if (!found) throw ValidationError("no interferers in group '" + group + "'");
    return s;
}

nlohmann::json ReproConfig::to_json() const {
    nlohmann::json j;
    j["grid"] = {{"n_subcarriers", grid.n_subcarriers}, {"bandwidth_hz", grid.bandwidth_hz},
                 {"guard_fraction", grid.guard_fraction}};
    j["link"] = {{"d_tx_rx_m", link.d_tx_rx_m},
                 {"d_intf_rx_m", link.d_intf_rx_m},
                 {"carrier_freq_hz", link.carrier_freq_hz},
                 {"tx_power_w", link.tx_power_w},
                 {"noise_temp_k", link.noise_temp_k},
                 {"noise_figure_db", link.noise_figure_db},
                 {"desired_gain_db", link.desired_gain_db},
                 {"interferer_gain_db", link.interferer_gain_db}};
    j["interferers"] = nlohmann::json::array();
    for (const auto& e : interferers) {
        auto item = spec_to_json(e.spec);
        item["group"] = e.group;
        j["interferers"].push_back(item);
    }
    j["allocator"] = {{"k_threshold", allocator.k_threshold}, {"k_values", allocator.k_values}};
    j["ber"] = {{"seed", ber.seed},
                {"min_bits", ber.rule.min_bits},
                {"min_errors", ber.rule.min_errors},
                {"max_bits", ber.rule.max_bits},
                {"batch_symbols", ber.rule.batch_symbols},
                {"oversampling", ber.oversampling},
                {"flat_oversampling", ber.flat_oversampling},
                {"mode", to_string(ber.mode)},
                {"threads", ber.threads},
                {"cp_in_eb", ber.cp_in_eb},
                {"d_tx_rx_m", ber.d_tx_rx_m},
                {"d_intf_rx_m", ber.d_intf_rx_m},
                {"flat_d_intf_rx_m", ber.flat_d_intf_rx_m},
                {"k_sweep_d_tx_rx_m", ber.k_sweep_d_tx_rx_m}};
    j["capacity"] = {{"d_tx_rx_m", capacity.d_tx_rx_m},
                     {"d_intf_rx_m", capacity.d_intf_rx_m},
                     {"flat_reference", capacity.flat_reference}};
    j["psd"] = {{"duration_s", psd.duration_s},
                {"resolution_hz", psd.resolution_hz},
                {"oversampling", psd.oversampling},
                {"seed", psd.seed}};
    return j;
}

ReproConfig ReproConfig::from_json(const nlohmann::json& j) {
    try {
        ReproConfig c;
        const auto& g = j.at("grid");
        c.grid = {g.at("n_subcarriers").get<int>(), g.at("bandwidth_hz").get<double>(),
                  g.at("guard_fraction").get<double>()};
        const auto& l = j.at("link");
        c.link.d_tx_rx_m = l.at("d_tx_rx_m").get<double>();
        c.link.d_intf_rx_m = l.at("d_intf_rx_m").get<double>();
        c.link.carrier_freq_hz = l.at("carrier_freq_hz").get<double>();
        c.link.tx_power_w = l.at("tx_power_w").get<double>();
        c.link.noise_temp_k = l.at("noise_temp_k").get<double>();
        c.link.noise_figure_db = l.at("noise_figure_db").get<double>();
        c.link.desired_gain_db = l.at("desired_gain_db").get<double>();
        c.link.interferer_gain_db = l.at("interferer_gain_db").get<double>();
        for (const auto& item : j.at("interferers")) {
            c.interferers.push_back({item.at("group").get<std::string>(), spec_from_json(item)});
        }
        const auto& a = j.at("allocator");
        c.allocator.k_threshold = a.at("k_threshold").get<double>();
        c.allocator.k_values = a.at("k_values").get<std::vector<double>>();
        const auto& b = j.at("ber");
        c.ber.seed = b.at("seed").get<std::uint64_t>();
        c.ber.rule.min_bits = b.at("min_bits").get<long long>();
        c.ber.rule.min_errors = b.at("min_errors").get<long long>();
        c.ber.rule.max_bits = b.at("max_bits").get<long long>();
        c.ber.rule.batch_symbols = b.at("batch_symbols").get<int>();
        c.ber.oversampling = b.at("oversampling").get<int>();
        c.ber.flat_oversampling = b.at("flat_oversampling").get<int>();
        c.ber.mode = interference_mode_from_string(b.at("mode").get<std::string>());
        c.ber.threads = b.at("threads").get<int>();
        c.ber.cp_in_eb = b.at("cp_in_eb").get<bool>();
        c.ber.d_tx_rx_m = b.at("d_tx_rx_m").get<std::vector<double>>();
        c.ber.d_intf_rx_m = b.at("d_intf_rx_m").get<double>();
        c.ber.flat_d_intf_rx_m = b.at("flat_d_intf_rx_m").get<std::vector<double>>();
        c.ber.k_sweep_d_tx_rx_m = b.at("k_sweep_d_tx_rx_m").get<std::vector<double>>();
        const auto& cap = j.at("capacity");
        c.capacity.d_tx_rx_m = cap.at("d_tx_rx_m").get<double>();
        c.capacity.d_intf_rx_m = cap.at("d_intf_rx_m").get<double>();
        c.capacity.flat_reference = cap.at("flat_reference").get<double>();
        const auto& p = j.at("psd");
        c.psd.duration_s = p.at("duration_s").get<double>();
        c.psd.resolution_hz = p.at("resolution_hz").get<double>();
        c.psd.oversampling = p.at("oversampling").get<int>();
        c.psd.seed = p.at("seed").get<std::uint64_t>();
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config JSON: ") + e.what());
    }
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ReproConfig::hash() const { return fnv1a_hex(to_json().dump()); }

ReproConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    auto doc = parse_document(buf.str(), path.string());
    apply_overrides(doc, overrides);
    return config_from_document(doc);
}

}  // namespace specshape
