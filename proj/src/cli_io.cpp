#include "bilattice/cli_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace bilattice::io {

namespace {

struct Entry {
    std::string value;
    int line;
};

struct Parsed {
    std::vector<double> values;
    std::string unit;
};

const std::map<std::string, std::set<std::string>>& key_usage() {
    // Engines for which each key matters; "*" marks keys read by every engine.
    static const std::map<std::string, std::set<std::string>> usage = {
        {"title", {"*"}},
        {"engine", {"*"}},
        {"reference", {"*"}},
        {"species", {"*"}},
        {"species_even", {"*"}},
        {"species_odd", {"*"}},
        {"detuning", {"*"}},
        {"detuning_even", {"*"}},
        {"detuning_odd", {"*"}},
        {"lattice_detuning", {"*"}},
        {"cell_size", {"*"}},
        {"rho", {"*"}},
        {"beta", {"*"}},
        {"workers", {"*"}},
        {"fail_fast", {"*"}},
        {"areal_density", {"transmit"}},
        {"planes", {"bands", "gaps", "transmit", "cavity"}},
        {"cells", {"bands", "gaps", "transmit", "cavity"}},
        {"mode_waist", {"bands", "gaps"}},
        {"mode_area", {"bands", "gaps"}},
        {"n_bz", {"bands", "gaps"}},
        {"n_q", {"bands", "gaps"}},
        {"q_max", {"bands", "gaps"}},
        {"cover_tol", {"gaps"}},
        {"window", {"gaps"}},
        {"probe", {"transmit", "cavity"}},
        {"cavity_detuning", {"cavity"}},
        {"cavity_linewidth", {"cavity"}},
        {"finesse", {"cavity"}},
        {"cavity_length", {"cavity"}},
        {"cavity_waist", {"cavity"}},
        {"phi", {"cavity"}},
        {"pump", {"cavity"}},
        {"occupancy", {"cavity"}},
        {"commensurate", {"cavity"}},
        {"mode_index", {"cavity"}},
        {"mirror_reflectivity", {"cavity"}},
    };
    return usage;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

class Reader {
public:
    Reader(std::map<std::string, Entry> entries, std::string source)
        : entries_(std::move(entries)), source_(std::move(source)) {}

    [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        const auto it = entries_.find(key);
        std::ostringstream msg;
        msg << source_;
        if (it != entries_.end()) msg << ':' << it->second.line;
        msg << ": key '" << key << "': " << message;
        throw ConfigError(msg.str());
    }

    Parsed parse(const std::string& key) const {
        const std::string& text = entries_.at(key).value;
        Parsed p;
        std::string rest;
        if (text.rfind("linspace(", 0) == 0 || text.rfind("[", 0) == 0) {
            const bool lin = text[0] == 'l';
            const char close = lin ? ')' : ']';
            const auto end = text.find(close);
            if (end == std::string::npos) fail(key, std::string("missing '") + close + "'");
            const std::string body = text.substr(lin ? 9 : 1, end - (lin ? 9 : 1));
            std::vector<double> items;
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) items.push_back(number(key, trim(item)));
            if (lin) {
                if (items.size() != 3) fail(key, "linspace takes (start, stop, count)");
                const double count = items[2];
                if (!(count >= 1.0) || count != std::floor(count)) fail(key, "linspace count must be a positive integer");
                const auto n = static_cast<std::size_t>(count);
                for (std::size_t i = 0; i < n; ++i) {
                    p.values.push_back(n == 1 ? items[0]
                                              : items[0] + (items[1] - items[0]) * static_cast<double>(i) /
                                                               static_cast<double>(n - 1));
                }
            } else {
                if (items.empty()) fail(key, "empty list");
                p.values = items;
            }
            rest = text.substr(end + 1);
        } else {
            const auto space = text.find_first_of(" \t");
            p.values.push_back(number(key, text.substr(0, space)));
            rest = space == std::string::npos ? "" : text.substr(space);
        }
        p.unit = trim(rest);
        return p;
    }

    Parsed unitless(const std::string& key) const {
        auto p = parse(key);
        if (!p.unit.empty()) fail(key, "takes no unit, got '" + p.unit + "'");
        return p;
    }

    double unitless_scalar(const std::string& key) const {
        const auto p = unitless(key);
        if (p.values.size() != 1) fail(key, "expected a single value");
        return p.values.front();
    }

    long long integer(const std::string& key) const {
        const double v = unitless_scalar(key);
        if (v != std::floor(v) || std::abs(v) > 9e15) fail(key, "expected an integer");
        return static_cast<long long>(v);
    }

    bool boolean(const std::string& key) const {
        const std::string v = lower(entries_.at(key).value);
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        fail(key, "expected true or false");
    }

    std::string word(const std::string& key) const { return lower(entries_.at(key).value); }
    std::string text(const std::string& key) const { return entries_.at(key).value; }

    const std::map<std::string, Entry>& entries() const { return entries_; }

private:
    double number(const std::string& key, const std::string& token) const {
        if (token.empty()) fail(key, "missing number");
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v)) {
            fail(key, "'" + token + "' is not a number");
        }
        return v;
    }

    std::map<std::string, Entry> entries_;
    std::string source_;
};

std::map<std::string, Entry> tokenize(std::string_view text, const std::string& source) {
    std::map<std::string, Entry> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string content = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line) + ": expected 'key = value'");
        }
        const std::string key = lower(trim(content.substr(0, eq)));
        const std::string value = trim(content.substr(eq + 1));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(line) + ": empty key");
        if (!key_usage().count(key)) {
            throw ConfigError(source + ":" + std::to_string(line) + ": unknown key '" + key + "'");
        }
        if (value.empty()) {
            throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key + "' has no value");
        }
        if (entries.count(key)) {
            throw ConfigError(source + ":" + std::to_string(line) + ": key '" + key +
                              "' repeats line " + std::to_string(entries[key].line));
        }
        entries[key] = {value, line};
    }
    return entries;
}

AtomSpecies species_preset(const Reader& r, const std::string& key) {
    const std::string name = r.word(key);
    if (name == "rb85_d2" || name == "rb85") return rb85_d2();
    r.fail(key, "unknown species '" + name + "' (available: rb85_d2)");
}

/// rad/s per unit of a frequency difference.
double frequency_unit(const Reader& r, const std::string& key, const std::string& unit, double gamma) {
    const double two_pi = 2.0 * constants::pi;
    if (unit == "gamma") return gamma;
    if (unit == "rad/s") return 1.0;
    if (unit == "ghz") return two_pi * 1e9;
    if (unit == "mhz") return two_pi * 1e6;
    if (unit == "khz") return two_pi * 1e3;
    if (unit == "hz") return two_pi;
    r.fail(key, "unit '" + unit + "' is not a frequency (gamma, GHz, MHz, kHz, Hz, rad/s)");
}

std::vector<double> frequencies(const Reader& r, const std::string& key, double gamma) {
    auto p = r.parse(key);
    if (p.unit.empty()) r.fail(key, "needs a frequency unit");
    const double f = frequency_unit(r, key, lower(p.unit), gamma);
    for (auto& v : p.values) v *= f;
    return p.values;
}

double frequency(const Reader& r, const std::string& key, double gamma) {
    const auto v = frequencies(r, key, gamma);
    if (v.size() != 1) r.fail(key, "expected a single value");
    return v.front();
}

struct LengthScales {
    double lambda;        // reference wavelength
    double lambda_lattice;
    std::optional<double> cell;
};

std::vector<double> lengths(const Reader& r, const std::string& key, const LengthScales& s) {
    auto p = r.parse(key);
    const std::string unit = lower(p.unit);
    double f = 0.0;
    if (unit == "m") f = 1.0;
    else if (unit == "cm") f = 1e-2;
    else if (unit == "mm") f = 1e-3;
    else if (unit == "um") f = 1e-6;
    else if (unit == "nm") f = 1e-9;
    else if (unit == "lambda") f = s.lambda;
    else if (unit == "lambda_l") f = s.lambda_lattice;
    else if (unit == "a" && s.cell) f = *s.cell;
    else r.fail(key, "unit '" + p.unit + "' is not a length (m, cm, mm, um, nm, lambda, lambda_L" +
                         std::string(s.cell ? ", a)" : ")"));
    for (auto& v : p.values) v *= f;
    return p.values;
}

double length(const Reader& r, const std::string& key, const LengthScales& s) {
    const auto v = lengths(r, key, s);
    if (v.size() != 1) r.fail(key, "expected a single value");
    return v.front();
}

std::vector<double> angles(const Reader& r, const std::string& key) {
    auto p = r.parse(key);
    const std::string unit = lower(p.unit);
    double f = 0.0;
    if (unit == "rad" || unit.empty()) f = 1.0;
    else if (unit == "pi") f = constants::pi;
    else if (unit == "deg") f = constants::pi / 180.0;
    else r.fail(key, "unit '" + p.unit + "' is not an angle (rad, pi, deg)");
    for (auto& v : p.values) v *= f;
    return p.values;
}

void require_one_of(const Reader& r, std::initializer_list<const char*> keys, const std::string& engine) {
    for (const char* k : keys) {
        if (r.has(k)) return;
    }
    std::string names;
    for (const char* k : keys) names += (names.empty() ? "" : " or ") + std::string("'") + k + "'";
    throw ConfigError("missing required key " + names + " for the " + engine + " engine");
}

}  // namespace

Command parse_command(std::string_view name) {
    if (name == "bands") return Command::bands;
    if (name == "gaps") return Command::gaps;
    if (name == "transmit") return Command::transmit;
    if (name == "cavity") return Command::cavity;
    if (name == "scan") return Command::scan;
    throw ConfigError("unknown command '" + std::string(name) + "'");
}

Format parse_format(std::string_view name) {
    if (name == "csv") return Format::csv;
    if (name == "json") return Format::json;
    throw ConfigError("unknown format '" + std::string(name) + "' (csv or json)");
}

const char* command_name(Command command) {
    switch (command) {
        case Command::bands: return "bands";
        case Command::gaps: return "gaps";
        case Command::transmit: return "transmit";
        case Command::cavity: return "cavity";
        case Command::scan: return "scan";
    }
    return "unknown";
}

std::vector<std::string> known_keys() {
    std::vector<std::string> keys;
    for (const auto& [k, _] : key_usage()) keys.push_back(k);
    return keys;
}

RunConfig parse_config(std::string_view text, Command command, std::string_view source_view) {
    const std::string source(source_view);
    const Reader r(tokenize(text, source), source);
    RunConfig run;
    run.command = command;
    if (r.has("title")) run.title = r.text("title");

    // Engine.
    sweep::Engine engine = sweep::Engine::transmit;
    if (command == Command::scan) {
        if (!r.has("engine")) throw ConfigError(source + ": the scan command needs an 'engine' key");
        const std::string name = r.word("engine");
        if (name == "bands") engine = sweep::Engine::bands;
        else if (name == "gaps") engine = sweep::Engine::gaps;
        else if (name == "transmit") engine = sweep::Engine::transmit;
        else if (name == "cavity") engine = sweep::Engine::cavity;
        else r.fail("engine", "expected bands, gaps, transmit or cavity");
    } else {
        engine = static_cast<sweep::Engine>(static_cast<int>(command));
        if (r.has("engine") && r.word("engine") != command_name(command)) {
            r.fail("engine", "does not match the '" + std::string(command_name(command)) + "' command");
        }
    }
    const std::string engine_str = sweep::engine_name(engine);
    for (const auto& [key, entry] : r.entries()) {
        const auto& use = key_usage().at(key);
        if (!use.count("*") && !use.count(engine_str)) {
            warn(source + ":" + std::to_string(entry.line) + ": key '" + key + "' is not used by the " +
                 engine_str + " engine");
        }
    }

    // Species.
    const AtomSpecies reference = r.has("reference") ? species_preset(r, "reference") : rb85_d2();
    const double omega0 = reference.frequency();
    const double gamma = reference.linewidth();
    AtomSpecies base_species = r.has("species") ? species_preset(r, "species") : reference;
    AtomSpecies even = r.has("species_even") ? species_preset(r, "species_even") : base_species;
    AtomSpecies odd = r.has("species_odd") ? species_preset(r, "species_odd") : base_species;
    const double common = r.has("detuning") ? frequency(r, "detuning", gamma) : 0.0;
    if (r.has("detuning") && (r.has("detuning_even") || r.has("detuning_odd"))) {
        r.fail("detuning", "give either 'detuning' or 'detuning_even'/'detuning_odd'");
    }
    const double det_even = r.has("detuning_even") ? frequency(r, "detuning_even", gamma) : common;
    const double det_odd = r.has("detuning_odd") ? frequency(r, "detuning_odd", gamma) : common;
    try {
        if (det_even != 0.0) even = even.shifted_to(omega0 + det_even);
        if (det_odd != 0.0) odd = odd.shifted_to(omega0 + det_odd);
    } catch (const DomainError& e) {
        throw ConfigError(source + ": detuning: " + e.what());
    }

    // Geometry.
    const double omega_lattice = omega0 + (r.has("lattice_detuning") ? frequency(r, "lattice_detuning", gamma) : 0.0);
    if (!(omega_lattice > 0.0)) r.fail("lattice_detuning", "lattice frequency must be positive");
    LengthScales scales{reference.wavelength(), 2.0 * constants::pi * constants::c / omega_lattice, std::nullopt};
    if (r.has("lattice_detuning") && r.has("cell_size")) {
        r.fail("cell_size", "give either 'cell_size' or 'lattice_detuning'");
    }
    const double cell = r.has("cell_size") ? length(r, "cell_size", scales) : scales.lambda_lattice;
    if (!(cell > 0.0)) r.fail("cell_size", "must be positive");
    scales.cell = cell;

    auto& spec = run.spec;
    spec.engine = engine;
    spec.reference = omega0;
    spec.parameter_columns = command == Command::scan;
    require_one_of(r, {"rho", "beta"}, engine_str);
    if (r.has("rho") && r.has("beta")) r.fail("beta", "give either 'rho' or 'beta'");
    double rho = 0.0;
    if (r.has("rho")) {
        const auto grid = lengths(r, "rho", scales);
        for (double v : grid) {
            if (!(v >= 0.0 && v <= cell * (1.0 + 1e-12))) r.fail("rho", "must satisfy 0 <= rho <= a");
        }
        rho = std::min(grid.front(), cell);
        if (grid.size() > 1) {
            for (double v : grid) spec.rho_grid.push_back(std::min(v, cell));
        }
    } else {
        spec.beta_grid = r.unitless("beta").values;
        for (double b : spec.beta_grid) {
            if (!(b * b <= 4.0)) r.fail("beta", "|beta| must not exceed 2");
        }
        rho = beta_to_spacings(spec.beta_grid.front(), cell).first;
    }

    // Lattice.
    double density = 5.7e10;
    if (r.has("areal_density")) {
        const auto p = r.parse("areal_density");
        const std::string unit = lower(p.unit);
        double f = 0.0;
        if (unit == "um^-2" || unit == "1/um^2") f = 1e12;
        else if (unit == "m^-2" || unit == "1/m^2") f = 1.0;
        else if (unit == "cm^-2" || unit == "1/cm^2") f = 1e4;
        else r.fail("areal_density", "unit '" + p.unit + "' is not an areal density (um^-2, cm^-2, m^-2)");
        if (p.values.size() != 1) r.fail("areal_density", "expected a single value");
        density = p.values.front() * f;
    } else if (engine == sweep::Engine::transmit) {
        throw ConfigError(source + ": missing required key 'areal_density' for the transmit engine");
    }
    if (r.has("planes") && r.has("cells")) r.fail("cells", "give either 'planes' or 'cells'");
    long long cells = 1000;
    double planes = 2000.0;
    if (r.has("planes")) {
        const long long n = r.integer("planes");
        if (n < 2 || n % 2 != 0) r.fail("planes", "must be an even number >= 2");
        cells = n / 2;
        planes = static_cast<double>(n);
    } else if (r.has("cells")) {
        cells = r.integer("cells");
        if (cells < 1) r.fail("cells", "must be >= 1");
        planes = 2.0 * static_cast<double>(cells);
    } else if (engine == sweep::Engine::transmit || engine == sweep::Engine::cavity) {
        require_one_of(r, {"planes", "cells"}, engine_str);
    }
    if (r.has("mode_waist") && r.has("mode_area")) r.fail("mode_area", "give either 'mode_waist' or 'mode_area'");
    double area = gaussian_mode_area(5e-6);
    if (r.has("mode_waist")) {
        const double w = length(r, "mode_waist", scales);
        if (!(w > 0.0)) r.fail("mode_waist", "must be positive");
        area = gaussian_mode_area(w);
    } else if (r.has("mode_area")) {
        const auto p = r.parse("mode_area");
        const std::string unit = lower(p.unit);
        double f = 0.0;
        if (unit == "um^2") f = 1e-12;
        else if (unit == "m^2") f = 1.0;
        else r.fail("mode_area", "unit '" + p.unit + "' is not an area (um^2, m^2)");
        area = p.values.front() * f;
        if (!(area > 0.0)) r.fail("mode_area", "must be positive");
    }
    spec.lattice = LatticeConfig{cell, rho, cells, density, even, odd, area};

    // Probe grid.
    if (r.has("probe")) {
        for (double d : frequencies(r, "probe", gamma)) spec.probe_grid.push_back(omega0 + d);
    } else if (engine == sweep::Engine::transmit || engine == sweep::Engine::cavity) {
        require_one_of(r, {"probe"}, engine_str);
    }

    // Bands and gaps.
    if (r.has("n_bz")) {
        const long long n = r.integer("n_bz");
        if (n < 1 || n > 2000) r.fail("n_bz", "must lie in [1, 2000]");
        spec.band_options.n_bz = static_cast<int>(n);
    }
    if (r.has("n_q")) {
        const long long n = r.integer("n_q");
        if (n < 3 || n > 1000000) r.fail("n_q", "must lie in [3, 1e6]");
        spec.band_options.n_q = static_cast<int>(n);
    }
    if (r.has("q_max")) {
        const auto p = r.parse("q_max");
        const double g0 = 2.0 * constants::pi / cell;
        const std::string unit = lower(p.unit);
        double q = p.values.front();
        if (unit == "g0") q *= g0;
        else if (unit != "rad/m") r.fail("q_max", "unit must be G0 or rad/m");
        if (!(q > 0.0 && q <= 0.5 * g0 * (1.0 + 1e-12))) r.fail("q_max", "must lie in (0, G0/2]");
        spec.band_options.q_max = q;
    }
    if (r.has("cover_tol") || r.has("window")) {
        bands::GapOptions g = bands::default_gap_options(spec.lattice);
        if (r.has("cover_tol")) {
            g.cover_tol = frequency(r, "cover_tol", gamma);
            if (!(g.cover_tol > 0.0)) r.fail("cover_tol", "must be positive");
        }
        if (r.has("window")) {
            const auto w = frequencies(r, "window", gamma);
            if (w.size() != 2 || !(w[1] > w[0])) r.fail("window", "expected [low, high] with low < high");
            g.window_low = omega0 + w[0];
            g.window_high = omega0 + w[1];
        }
        spec.gap_options = g;
    }

    // Cavity.
    if (engine == sweep::Engine::cavity) {
        require_one_of(r, {"cavity_length"}, engine_str);
        require_one_of(r, {"cavity_waist"}, engine_str);
        require_one_of(r, {"cavity_linewidth", "finesse"}, engine_str);
        cavity::CavityConfig c{omega0 + (r.has("cavity_detuning") ? frequency(r, "cavity_detuning", gamma) : 0.0),
                               std::nullopt,
                               length(r, "cavity_length", scales),
                               std::nullopt,
                               length(r, "cavity_waist", scales),
                               0.0,
                               1.0,
                               1.0,
                               planes,
                               cell,
                               false,
                               2,
                               std::nullopt,
                               even,
                               odd};
        if (r.has("cavity_linewidth")) c.linewidth = frequency(r, "cavity_linewidth", gamma);
        if (r.has("finesse")) c.finesse = r.unitless_scalar("finesse");
        if (r.has("phi")) {
            const auto phases = angles(r, "phi");
            c.phase = phases.front();
            if (phases.size() > 1) spec.phase_grid = phases;
        }
        if (r.has("pump")) {
            const auto p = r.parse("pump");
            const std::string unit = lower(p.unit);
            c.pump = p.values.front() * ((unit == "1/s" || unit == "s^-1" || unit.empty())
                                             ? 1.0
                                             : frequency_unit(r, "pump", unit, gamma));
        }
        if (r.has("occupancy")) c.occupancy = r.unitless_scalar("occupancy");
        if (r.has("commensurate")) c.commensurate = r.boolean("commensurate");
        if (r.has("mode_index")) c.mode_index = static_cast<int>(r.integer("mode_index"));
        if (r.has("mirror_reflectivity")) {
            const double refl = r.unitless_scalar("mirror_reflectivity");
            if (!(refl >= 0.0 && refl <= 1.0)) r.fail("mirror_reflectivity", "must lie in [0, 1]");
            c.mirror_reflectivity = refl;
        }
        try {
            c.validate();
        } catch (const DomainError& e) {
            throw ConfigError(source + ": cavity: " + e.what());
        }
        spec.cavity = c;
    }

    // Run control.
    if (r.has("workers")) {
        const long long w = r.integer("workers");
        if (w < 0 || w > 1024) r.fail("workers", "must lie in [0, 1024]");
        spec.workers = static_cast<unsigned>(w);
    }
    if (r.has("fail_fast")) spec.fail_fast = r.boolean("fail_fast");

    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return run;
}

RunConfig load_config(const std::filesystem::path& path, Command command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), command, path.string());
}

double round_significant(double value) {
    if (!std::isfinite(value)) return value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return std::strtod(buf, nullptr);
}

namespace {

std::string format_cell(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double parse_cell(const std::string& token) {
    const std::string t = lower(trim(token));
    if (t == "nan" || t.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw std::runtime_error("bad table value '" + token + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_table(const Table& table, std::ostream& out, Format format) {
    if (format == Format::csv) {
        for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
        out << '\n';
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
            out << '\n';
        }
    } else {
        nlohmann::ordered_json doc;
        doc["columns"] = table.columns;
        doc["rows"] = nlohmann::ordered_json::array();
        for (const auto& row : table.rows) {
            auto jrow = nlohmann::ordered_json::array();
            for (double v : row) {
                if (std::isfinite(v)) jrow.push_back(round_significant(v));
                else jrow.push_back(nullptr);
            }
            doc["rows"].push_back(std::move(jrow));
        }
        doc["metadata"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : table.metadata) doc["metadata"][k] = v;
        out << doc.dump(1) << '\n';
    }
    if (!out) throw std::runtime_error("failed to write table");
}

void write_table(const Table& table, const std::filesystem::path& path, Format format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    try {
        write_table(table, out, format);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

Table read_table(std::istream& in, Format format) {
    Table table;
    if (format == Format::csv) {
        std::string line;
        if (!std::getline(in, line)) throw std::runtime_error("empty table file");
        table.columns = split_csv(line);
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            const auto cells = split_csv(line);
            std::vector<double> row;
            row.reserve(cells.size());
            for (const auto& c : cells) row.push_back(parse_cell(c));
            table.add_row(std::move(row));
        }
        return table;
    }
    const auto doc = nlohmann::json::parse(in);
    table.columns = doc.at("columns").get<std::vector<std::string>>();
    for (const auto& jrow : doc.at("rows")) {
        std::vector<double> row;
        for (const auto& v : jrow) {
            row.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
        }
        table.add_row(std::move(row));
    }
    if (doc.contains("metadata")) {
        for (const auto& [k, v] : doc.at("metadata").items()) table.metadata.emplace_back(k, v.get<std::string>());
    }
    return table;
}

Table read_table(const std::filesystem::path& path, Format format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return read_table(in, format);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

}  // namespace bilattice::io
