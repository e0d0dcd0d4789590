#include "rcosc/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "rcosc/catalog.hpp"
#include "rcosc/errors.hpp"

namespace rcosc::io {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double prefix_scale(const std::string& prefix, const std::string& text) {
    if (prefix.empty()) return 1.0;
    if (prefix == "p") return 1e-12;
    if (prefix == "n") return 1e-9;
    if (prefix == "u" || prefix == "\xc2\xb5" || prefix == "\xce\xbc")
        return 1e-6;
    if (prefix == "m") return 1e-3;
    if (prefix == "k" || prefix == "K") return 1e3;
    if (prefix == "M") return 1e6;
    if (prefix == "G") return 1e9;
    throw OscError(Err::PARSE_ERROR,
                   "unknown unit prefix '" + prefix + "' in '" + text + "'");
}

} // namespace

double parse_quantity(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty()) {
        throw OscError(Err::PARSE_ERROR, "empty quantity");
    }
    const char* begin = s.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) {
        throw OscError(Err::PARSE_ERROR,
                       "quantity '" + s + "' does not start with a number");
    }
    std::string unit = trim(std::string(end));
    if (unit.empty()) return value;

    // Slew-rate style: volts per (scaled) second.
    const auto slash = unit.find('/');
    if (slash != std::string::npos) {
        const std::string num_unit = trim(unit.substr(0, slash));
        std::string den = trim(unit.substr(slash + 1));
        if (num_unit != "V" || den.empty() || den.back() != 's') {
            throw OscError(Err::PARSE_ERROR,
                           "unknown unit '" + unit + "' in '" + s + "'");
        }
        den.pop_back();
        return value / prefix_scale(trim(den), s);
    }

    static const char* bases[] = {"ohm", "\xce\xa9", "Hz", "F", "V", "A", "s"};
    for (const char* base : bases) {
        const std::string b(base);
        const bool ci = b == "ohm"; // data sheets write Ohm, ohm, OHM
        const std::string u = ci ? lower(unit) : unit;
        const std::string bb = ci ? lower(b) : b;
        if (u.size() >= bb.size() &&
            u.compare(u.size() - bb.size(), bb.size(), bb) == 0) {
            const std::string prefix =
                trim(unit.substr(0, unit.size() - bb.size()));
            return value * prefix_scale(prefix, s);
        }
    }
    // A bare scale suffix like "100k".
    return value * prefix_scale(unit, s);
}

namespace {

// One parsed INI file: section -> key -> (value, line number). Duplicate keys
// are rejected so typos do not silently win.
struct IniFile {
    std::string path;
    std::map<std::string, std::map<std::string, std::pair<std::string, int>>>
        data;

    bool has_section(const std::string& section) const {
        return data.count(section) != 0;
    }
    const std::string* find(const std::string& section,
                            const std::string& key) const {
        const auto sec = data.find(section);
        if (sec == data.end()) return nullptr;
        const auto it = sec->second.find(key);
        if (it == sec->second.end()) return nullptr;
        return &it->second.first;
    }
    std::string require(const std::string& section,
                        const std::string& key) const {
        const std::string* v = find(section, key);
        if (!v) {
            throw OscError(Err::PARSE_ERROR, path + ": missing key '" + key +
                                                 "' in section [" + section +
                                                 "]");
        }
        return *v;
    }
};

IniFile parse_ini(const std::string& path, const std::string& content) {
    IniFile ini;
    ini.path = path;
    std::istringstream is(content);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw OscError(Err::PARSE_ERROR,
                               path + ":" + std::to_string(line_no) +
                                   ": unterminated section header");
            }
            section = lower(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw OscError(Err::PARSE_ERROR,
                           path + ":" + std::to_string(line_no) +
                               ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw OscError(Err::PARSE_ERROR,
                           path + ":" + std::to_string(line_no) +
                               ": empty key or value");
        }
        if (!ini.data[section].emplace(key, std::make_pair(value, line_no))
                 .second) {
            throw OscError(Err::PARSE_ERROR,
                           path + ":" + std::to_string(line_no) +
                               ": duplicate key '" + key + "'");
        }
    }
    return ini;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw OscError(Err::PARSE_ERROR, path + ": cannot open file");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Config, requirements, and sweep documents are JSON objects; an INI file
// starts with a [section] header or a key, never with a brace.
bool looks_like_json(const std::string& content) {
    for (char c : content) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        return c == '{';
    }
    return false;
}

bool parse_bool(const std::string& text, const std::string& where) {
    const std::string v = lower(trim(text));
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    throw OscError(Err::PARSE_ERROR,
                   where + ": expected a boolean, got '" + text + "'");
}

std::set<Effect> parse_effects(const std::string& text,
                               const std::string& where) {
    const std::string v = lower(trim(text));
    if (v == "all") return NonIdealityProfile::all_effects();
    std::set<Effect> out;
    if (v == "none") return out;
    for (const std::string& tok : split_list(v)) {
        if (tok == "gbw") {
            out.insert(Effect::GBW);
        } else if (tok == "slew") {
            out.insert(Effect::SLEW);
        } else if (tok == "offset") {
            out.insert(Effect::OFFSET);
        } else if (tok == "bias") {
            out.insert(Effect::BIAS);
        } else if (tok == "zcd_offset") {
            out.insert(Effect::ZCD_OFFSET);
        } else if (tok == "delays") {
            out.insert(Effect::DELAYS);
        } else {
            throw OscError(Err::PARSE_ERROR,
                           where + ": unknown effect '" + tok +
                               "' (expected gbw, slew, offset, bias, "
                               "zcd_offset, delays, all, none)");
        }
    }
    return out;
}

// JSON values may be numbers or quantity strings like "330 pF".
double json_quantity(const json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_quantity(j.get<std::string>());
    throw OscError(Err::PARSE_ERROR,
                   where + ": expected a number or quantity string");
}

OpAmpModel opamp_from_json(const json& j, const std::string& where) {
    OpAmpModel m;
    m.name = j.value("name", std::string("inline"));
    m.gbw_hz = json_quantity(j.at("gbw"), where + ".gbw");
    m.slew_rate = json_quantity(j.at("slew_rate"), where + ".slew_rate");
    m.v_offset = json_quantity(j.at("v_offset"), where + ".v_offset");
    m.i_bias = json_quantity(j.at("i_bias"), where + ".i_bias");
    if (j.contains("c_parasitic"))
        m.c_parasitic = json_quantity(j["c_parasitic"], where + ".c_parasitic");
    if (j.contains("delay_lh"))
        m.delay_lh = json_quantity(j["delay_lh"], where + ".delay_lh");
    if (j.contains("delay_hl"))
        m.delay_hl = json_quantity(j["delay_hl"], where + ".delay_hl");
    return m;
}

OpAmpModel opamp_from_ini(const IniFile& ini) {
    OpAmpModel m;
    const std::string* name = ini.find("opamp", "name");
    m.name = name ? *name : "inline";
    m.gbw_hz = parse_quantity(ini.require("opamp", "gbw"));
    m.slew_rate = parse_quantity(ini.require("opamp", "slew_rate"));
    m.v_offset = parse_quantity(ini.require("opamp", "v_offset"));
    m.i_bias = parse_quantity(ini.require("opamp", "i_bias"));
    if (const std::string* v = ini.find("opamp", "c_parasitic"))
        m.c_parasitic = parse_quantity(*v);
    if (const std::string* v = ini.find("opamp", "delay_lh"))
        m.delay_lh = parse_quantity(*v);
    if (const std::string* v = ini.find("opamp", "delay_hl"))
        m.delay_hl = parse_quantity(*v);
    return m;
}

ConfigBundle config_from_ini(const IniFile& ini) {
    ConfigBundle b;
    b.config.c_i = parse_quantity(ini.require("oscillator", "c_i"));
    b.config.alpha = parse_quantity(ini.require("oscillator", "alpha"));
    b.config.v_p = parse_quantity(ini.require("oscillator", "v_p"));
    if (const std::string* v = ini.find("oscillator", "xor_delay"))
        b.config.xor_delay = parse_quantity(*v);
    b.config.sensor.r_x = parse_quantity(ini.require("sensor", "r_x"));
    b.config.sensor.c_x = parse_quantity(ini.require("sensor", "c_x"));

    const std::string* by_name = ini.find("profile", "opamp");
    const bool inline_opamp = ini.has_section("opamp");
    if (by_name && inline_opamp) {
        throw OscError(Err::PARSE_ERROR,
                       ini.path + ": give either profile.opamp or an [opamp] "
                                  "section, not both");
    }
    if (by_name) {
        b.profile = profile_from_opamp(find_opamp(builtin_catalog(), *by_name));
    } else if (inline_opamp) {
        b.profile = profile_from_opamp(opamp_from_ini(ini));
    } else {
        b.profile = near_ideal_profile();
    }
    if (const std::string* v = ini.find("zcd", "v_offset_z"))
        b.profile.zcd.v_offset_z = parse_quantity(*v);
    if (const std::string* v = ini.find("zcd", "delay_lh"))
        b.profile.zcd.delay_lh = parse_quantity(*v);
    if (const std::string* v = ini.find("zcd", "delay_hl"))
        b.profile.zcd.delay_hl = parse_quantity(*v);
    if (const std::string* v = ini.find("profile", "effects"))
        b.profile.enabled = parse_effects(*v, ini.path + ": effects");
    return b;
}

ConfigBundle config_from_json(const std::string& path, const json& j) {
    ConfigBundle b;
    const json& osc = j.at("oscillator");
    b.config.c_i = json_quantity(osc.at("c_i"), path + ": oscillator.c_i");
    b.config.alpha = json_quantity(osc.at("alpha"), path + ": oscillator.alpha");
    b.config.v_p = json_quantity(osc.at("v_p"), path + ": oscillator.v_p");
    if (osc.contains("xor_delay"))
        b.config.xor_delay =
            json_quantity(osc["xor_delay"], path + ": oscillator.xor_delay");
    const json& sensor = j.at("sensor");
    b.config.sensor.r_x = json_quantity(sensor.at("r_x"), path + ": sensor.r_x");
    b.config.sensor.c_x = json_quantity(sensor.at("c_x"), path + ": sensor.c_x");

    const json profile = j.value("profile", json::object());
    const bool by_name = profile.contains("opamp");
    const bool inline_opamp = j.contains("opamp");
    if (by_name && inline_opamp) {
        throw OscError(Err::PARSE_ERROR,
                       path + ": give either profile.opamp or a top-level "
                              "opamp object, not both");
    }
    if (by_name) {
        b.profile = profile_from_opamp(find_opamp(
            builtin_catalog(), profile["opamp"].get<std::string>()));
    } else if (inline_opamp) {
        b.profile = profile_from_opamp(opamp_from_json(j["opamp"], path + ": opamp"));
    } else {
        b.profile = near_ideal_profile();
    }
    if (j.contains("zcd")) {
        const json& z = j["zcd"];
        if (z.contains("v_offset_z"))
            b.profile.zcd.v_offset_z =
                json_quantity(z["v_offset_z"], path + ": zcd.v_offset_z");
        if (z.contains("delay_lh"))
            b.profile.zcd.delay_lh =
                json_quantity(z["delay_lh"], path + ": zcd.delay_lh");
        if (z.contains("delay_hl"))
            b.profile.zcd.delay_hl =
                json_quantity(z["delay_hl"], path + ": zcd.delay_hl");
    }
    if (profile.contains("effects")) {
        const json& eff = profile["effects"];
        if (eff.is_string()) {
            b.profile.enabled =
                parse_effects(eff.get<std::string>(), path + ": effects");
        } else {
            std::string joined;
            for (const json& e : eff) {
                if (!joined.empty()) joined += ',';
                joined += e.get<std::string>();
            }
            b.profile.enabled = parse_effects(joined, path + ": effects");
        }
    }
    return b;
}

json parse_json(const std::string& path, const std::string& content) {
    try {
        return json::parse(content);
    } catch (const json::exception& e) {
        throw OscError(Err::PARSE_ERROR, path + ": " + e.what());
    }
}

} // namespace

std::set<Effect> parse_effect_list(const std::string& text) {
    return parse_effects(text, "effects");
}

ConfigBundle load_config(const std::string& path) {
    const std::string content = read_file(path);
    try {
        if (looks_like_json(content)) {
            return config_from_json(path, parse_json(path, content));
        }
        return config_from_ini(parse_ini(path, content));
    } catch (const json::exception& e) {
        throw OscError(Err::PARSE_ERROR, path + ": " + e.what());
    }
}

design::DesignRequirements load_requirements(const std::string& path) {
    const std::string content = read_file(path);
    design::DesignRequirements req;
    if (looks_like_json(content)) {
        const json root = parse_json(path, content);
        const json& j = root.contains("requirements") ? root["requirements"]
                                                      : root;
        try {
            req.rx_min = json_quantity(j.at("rx_min"), path + ": rx_min");
            req.rx_max = json_quantity(j.at("rx_max"), path + ": rx_max");
            req.cx_max = json_quantity(j.at("cx_max"), path + ": cx_max");
            req.c_i = json_quantity(j.at("c_i"), path + ": c_i");
            req.alpha = json_quantity(j.at("alpha"), path + ": alpha");
            req.v_p = json_quantity(j.at("v_p"), path + ": v_p");
            req.epsilon_pct =
                json_quantity(j.at("epsilon_pct"), path + ": epsilon_pct");
        } catch (const json::exception& e) {
            throw OscError(Err::PARSE_ERROR, path + ": " + e.what());
        }
    } else {
        const IniFile ini = parse_ini(path, content);
        req.rx_min = parse_quantity(ini.require("requirements", "rx_min"));
        req.rx_max = parse_quantity(ini.require("requirements", "rx_max"));
        req.cx_max = parse_quantity(ini.require("requirements", "cx_max"));
        req.c_i = parse_quantity(ini.require("requirements", "c_i"));
        req.alpha = parse_quantity(ini.require("requirements", "alpha"));
        req.v_p = parse_quantity(ini.require("requirements", "v_p"));
        req.epsilon_pct =
            parse_quantity(ini.require("requirements", "epsilon_pct"));
    }
    if (req.rx_min > req.rx_max) {
        throw OscError(Err::PARSE_ERROR,
                       path + ": rx_min exceeds rx_max");
    }
    if (!(req.epsilon_pct > 0.0)) {
        throw OscError(Err::PARSE_ERROR, path + ": epsilon_pct must be > 0");
    }
    return req;
}

sweep::SweepSpec load_sweep(const std::string& path) {
    const std::string content = read_file(path);
    sweep::SweepSpec spec;
    const auto modes_from_list = [&](const std::vector<std::string>& names) {
        for (const std::string& n : names) {
            spec.modes.push_back(estimate_method_from_string(n));
        }
    };
    if (looks_like_json(content)) {
        const json j = parse_json(path, content);
        try {
            const json& sw = j.at("sweep");
            for (const json& v : sw.at("rx"))
                spec.rx_values.push_back(json_quantity(v, path + ": sweep.rx"));
            for (const json& v : sw.at("cx"))
                spec.cx_values.push_back(json_quantity(v, path + ": sweep.cx"));
            for (const json& v : sw.at("opamps"))
                spec.opamps.push_back(v.get<std::string>());
            std::vector<std::string> mode_names;
            for (const json& v : sw.at("modes"))
                mode_names.push_back(v.get<std::string>());
            modes_from_list(mode_names);
            spec.quantize = sw.value("quantize", false);
            spec.transient = sw.value("transient", false);
            if (sw.contains("grid_cap"))
                spec.grid_cap = sw["grid_cap"].get<std::size_t>();
            if (sw.contains("clock_hz"))
                spec.timer.clock_hz =
                    json_quantity(sw["clock_hz"], path + ": sweep.clock_hz");
            if (sw.contains("bit_width"))
                spec.timer.bit_width = sw["bit_width"].get<int>();
            if (sw.contains("capture_jitter_rms"))
                spec.timer.capture_jitter_rms = json_quantity(
                    sw["capture_jitter_rms"], path + ": capture_jitter_rms");
            const json& osc = j.at("oscillator");
            spec.base.c_i = json_quantity(osc.at("c_i"), path + ": c_i");
            spec.base.alpha = json_quantity(osc.at("alpha"), path + ": alpha");
            spec.base.v_p = json_quantity(osc.at("v_p"), path + ": v_p");
            if (osc.contains("xor_delay"))
                spec.base.xor_delay =
                    json_quantity(osc["xor_delay"], path + ": xor_delay");
            if (j.contains("zcd")) {
                ComparatorModel z;
                const json& zj = j["zcd"];
                z.v_offset_z = zj.value("v_offset_z", 0.0);
                z.delay_lh = zj.value("delay_lh", 0.0);
                z.delay_hl = zj.value("delay_hl", 0.0);
                spec.zcd_override = z;
            }
        } catch (const json::exception& e) {
            throw OscError(Err::PARSE_ERROR, path + ": " + e.what());
        }
    } else {
        const IniFile ini = parse_ini(path, content);
        for (const std::string& v : split_list(ini.require("sweep", "rx")))
            spec.rx_values.push_back(parse_quantity(v));
        for (const std::string& v : split_list(ini.require("sweep", "cx")))
            spec.cx_values.push_back(parse_quantity(v));
        spec.opamps = split_list(ini.require("sweep", "opamps"));
        modes_from_list(split_list(ini.require("sweep", "modes")));
        if (const std::string* v = ini.find("sweep", "quantize"))
            spec.quantize = parse_bool(*v, path + ": quantize");
        if (const std::string* v = ini.find("sweep", "transient"))
            spec.transient = parse_bool(*v, path + ": transient");
        if (const std::string* v = ini.find("sweep", "grid_cap"))
            spec.grid_cap =
                static_cast<std::size_t>(parse_quantity(*v));
        if (const std::string* v = ini.find("sweep", "clock_hz"))
            spec.timer.clock_hz = parse_quantity(*v);
        if (const std::string* v = ini.find("sweep", "bit_width"))
            spec.timer.bit_width = static_cast<int>(parse_quantity(*v));
        if (const std::string* v = ini.find("sweep", "capture_jitter_rms"))
            spec.timer.capture_jitter_rms = parse_quantity(*v);
        spec.base.c_i = parse_quantity(ini.require("oscillator", "c_i"));
        spec.base.alpha = parse_quantity(ini.require("oscillator", "alpha"));
        spec.base.v_p = parse_quantity(ini.require("oscillator", "v_p"));
        if (const std::string* v = ini.find("oscillator", "xor_delay"))
            spec.base.xor_delay = parse_quantity(*v);
        if (ini.has_section("zcd")) {
            ComparatorModel z;
            if (const std::string* v = ini.find("zcd", "v_offset_z"))
                z.v_offset_z = parse_quantity(*v);
            if (const std::string* v = ini.find("zcd", "delay_lh"))
                z.delay_lh = parse_quantity(*v);
            if (const std::string* v = ini.find("zcd", "delay_hl"))
                z.delay_hl = parse_quantity(*v);
            spec.zcd_override = z;
        }
    }
    return spec;
}

std::string catalog_to_json(const std::vector<OpAmpModel>& catalog) {
    json arr = json::array();
    for (const OpAmpModel& m : catalog) {
        json j;
        j["name"] = m.name;
        j["gbw_hz"] = m.gbw_hz;
        j["slew_rate"] = m.slew_rate;
        j["v_offset"] = m.v_offset;
        j["i_bias"] = m.i_bias;
        if (m.c_parasitic) j["c_parasitic"] = *m.c_parasitic;
        if (m.delay_lh) j["delay_lh"] = *m.delay_lh;
        if (m.delay_hl) j["delay_hl"] = *m.delay_hl;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<OpAmpModel> catalog_from_json(const std::string& text) {
    const json arr = parse_json("catalog", text);
    if (!arr.is_array()) {
        throw OscError(Err::PARSE_ERROR,
                       "catalog: expected a JSON array of op-amps");
    }
    std::vector<OpAmpModel> out;
    try {
        for (const json& j : arr) {
            OpAmpModel m;
            m.name = j.at("name").get<std::string>();
            m.gbw_hz = j.at("gbw_hz").get<double>();
            m.slew_rate = j.at("slew_rate").get<double>();
            m.v_offset = j.at("v_offset").get<double>();
            m.i_bias = j.at("i_bias").get<double>();
            if (j.contains("c_parasitic"))
                m.c_parasitic = j["c_parasitic"].get<double>();
            if (j.contains("delay_lh")) m.delay_lh = j["delay_lh"].get<double>();
            if (j.contains("delay_hl")) m.delay_hl = j["delay_hl"].get<double>();
            out.push_back(std::move(m));
        }
    } catch (const json::exception& e) {
        throw OscError(Err::PARSE_ERROR, std::string("catalog: ") + e.what());
    }
    return out;
}

} // namespace rcosc::io
