#pragma once

// Run configuration: a TOML subset (tables, numbers, booleans, strings,
// nested arrays, `#` comments, arrays may span lines) mapped onto the
// experiment configs. Every key is validated at parse time; unknown keys and
// sections are rejected by name.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "photon_detect/errors.hpp"
#include "photon_detect/experiments.hpp"

namespace photon_detect {

namespace toml {

struct Value {
    enum class Type { Number, Boolean, String, Array } type = Type::Number;
    double number = 0.0;
    bool boolean = false;
    std::string str;
    std::vector<Value> array;
};

using Table = std::map<std::string, Value>;

struct Document {
    std::map<std::string, Table> tables; // "" holds keys before the first header
    std::vector<std::string> order;      // table names in file order
};

namespace detail {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Document parse() {
        Document doc;
        std::string current;
        doc.tables[current];
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                const std::string name = read_bare('[');
                skip_spaces();
                expect(']');
                end_of_line();
                if (doc.tables.count(name)) fail("duplicate table [" + name + "]");
                doc.tables[name];
                doc.order.push_back(name);
                current = name;
                continue;
            }
            const std::string key = read_bare('=');
            skip_spaces();
            expect('=');
            skip_spaces();
            Value v = read_value();
            end_of_line();
            auto& table = doc.tables[current];
            if (table.count(key)) fail("duplicate key '" + key + "'");
            table.emplace(key, std::move(v));
        }
        return doc;
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return eof() ? '\0' : text_[pos_]; }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line()) + ": " + msg);
    }
    std::size_t line() const {
        std::size_t n = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) n += text_[i] == '\n';
        return n;
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }
    void skip_comment() {
        if (peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }
    void skip_blank_lines() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n')
                ++pos_;
            else
                break;
        }
    }
    // Whitespace, newlines and comments inside arrays.
    void skip_insignificant() {
        while (!eof()) {
            skip_spaces();
            skip_comment();
            if (peek() == '\n')
                ++pos_;
            else
                break;
        }
    }
    void expect(char c) {
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }
    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (!eof() && peek() != '\n') fail("unexpected trailing characters");
    }

    std::string read_bare(char context) {
        skip_spaces();
        const std::size_t start = pos_;
        while (!eof()) {
            const char c = peek();
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')
                ++pos_;
            else
                break;
        }
        if (pos_ == start) fail(context == '[' ? "empty table name" : "expected a key");
        return text_.substr(start, pos_ - start);
    }

    Value read_value() {
        Value v;
        const char c = peek();
        if (c == '"') {
            ++pos_;
            v.type = Value::Type::String;
            while (true) {
                if (eof() || peek() == '\n') fail("unterminated string");
                char ch = text_[pos_++];
                if (ch == '"') break;
                if (ch == '\\') {
                    if (eof()) fail("unterminated escape");
                    const char e = text_[pos_++];
                    switch (e) {
                    case 'n': ch = '\n'; break;
                    case 't': ch = '\t'; break;
                    case '"': ch = '"'; break;
                    case '\\': ch = '\\'; break;
                    default: fail(std::string("unsupported escape \\") + e);
                    }
                }
                v.str.push_back(ch);
            }
            return v;
        }
        if (c == '[') {
            ++pos_;
            v.type = Value::Type::Array;
            skip_insignificant();
            if (peek() == ']') {
                ++pos_;
                return v;
            }
            while (true) {
                skip_insignificant();
                v.array.push_back(read_value());
                skip_insignificant();
                if (peek() == ',') {
                    ++pos_;
                    skip_insignificant();
                    if (peek() == ']') {
                        ++pos_;
                        break;
                    }
                    continue;
                }
                expect(']');
                break;
            }
            return v;
        }
        const std::size_t start = pos_;
        while (!eof() && std::string_view(" \t\r\n,]#").find(peek()) == std::string_view::npos) ++pos_;
        const std::string token = text_.substr(start, pos_ - start);
        if (token == "true" || token == "false") {
            v.type = Value::Type::Boolean;
            v.boolean = token == "true";
            return v;
        }
        std::string digits;
        for (char ch : token)
            if (ch != '_') digits.push_back(ch);
        if (digits == "inf" || digits == "+inf" || digits == "-inf" || digits == "nan" || digits == "+nan" ||
            digits == "-nan") {
            v.number = std::strtod(digits.c_str(), nullptr);
            return v;
        }
        char* end = nullptr;
        v.number = std::strtod(digits.c_str(), &end);
        if (digits.empty() || end != digits.c_str() + digits.size()) fail("cannot parse value '" + token + "'");
        return v;
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

} // namespace detail

inline Document parse(const std::string& text) { return detail::Parser(text).parse(); }

} // namespace toml

// ---------------------------------------------------------------------------

struct CommutatorConfig {
    ModeSet modes;
    int cutoff = 1;
    Vec3 x = Vec3::Zero();
    Vec3 y = Vec3(0.25, 0.1, 0.4);
    std::vector<std::pair<int, int>> components;
    std::vector<double> times{0.0, 1.7};
};

struct PovmConfig {
    ModeSet modes;
    int cutoff = 1;
    AtomSpec atom;
    TimeWindow window;
    int steps = 2000;
    std::size_t photon_mode = 0;
};

struct ScalingConfig {
    ModeSet modes;
    int cutoff = 1;
    AtomSpec atom;
    TimeWindow window;
    int steps = 20000;
    double target = 1e-4;
    std::size_t photon_mode = 0;
};

using ExperimentSettings = std::variant<LineshapeConfig, MziConfig, CommutatorConfig, PovmConfig, ScalingConfig>;

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{"lineshape", "mzi", "commutator", "povm-check",
                                                "perturbation-scaling"};
    return names;
}

struct RunConfig {
    std::string experiment;
    ExperimentSettings settings;
    std::string output_path; // empty → standard output
    std::vector<std::string> echo;

    /// FNV-1a over the canonical echo; identical configs hash identically.
    std::uint64_t hash() const {
        std::uint64_t h = 14695981039346656037ull;
        for (const auto& line : echo) {
            for (unsigned char c : line) {
                h ^= c;
                h *= 1099511628211ull;
            }
            h ^= '\n';
            h *= 1099511628211ull;
        }
        return h;
    }
};

namespace detail {

class Section {
public:
    Section(std::string name, const toml::Table* table, std::vector<std::string>& echo)
        : name_(std::move(name)), table_(table), echo_(echo) {}

    bool present() const { return table_ != nullptr; }
    bool has(const std::string& key) const { return table_ && table_->count(key); }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const toml::Value* v = find(key, fallback.has_value());
        const double out = v ? as_number(key, *v) : *fallback;
        record(key, num(out));
        return out;
    }

    int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
        const double d = number_silent(key, fallback);
        if (d != std::floor(d) || std::abs(d) > 1e9) fail(key, "must be an integer");
        record(key, std::to_string(static_cast<int>(d)));
        return static_cast<int>(d);
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const toml::Value* v = find(key, fallback.has_value());
        std::string out = fallback.value_or("");
        if (v) {
            if (v->type != toml::Value::Type::String) fail(key, "must be a string");
            out = v->str;
        }
        record(key, "\"" + out + "\"");
        return out;
    }

    Vec3 vec3(const std::string& key, std::optional<Vec3> fallback = std::nullopt) {
        const toml::Value* v = find(key, fallback.has_value());
        const Vec3 out = v ? as_vec3(key, *v) : *fallback;
        record(key, fmt_vec(out));
        return out;
    }

    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
        const toml::Value* v = find(key, fallback.has_value());
        std::vector<double> out = fallback.value_or(std::vector<double>{});
        if (v) {
            out.clear();
            for (const auto& e : as_array(key, *v)) out.push_back(as_number(key, e));
        }
        std::string s = "[";
        for (std::size_t i = 0; i < out.size(); ++i) s += (i ? ", " : "") + num(out[i]);
        record(key, s + "]");
        return out;
    }

    std::vector<Vec3> vectors(const std::string& key, std::optional<std::vector<Vec3>> fallback = std::nullopt) {
        const toml::Value* v = find(key, fallback.has_value());
        std::vector<Vec3> out = fallback.value_or(std::vector<Vec3>{});
        if (v) {
            out.clear();
            for (const auto& e : as_array(key, *v)) out.push_back(as_vec3(key, e));
        }
        std::string s = "[";
        for (std::size_t i = 0; i < out.size(); ++i) s += (i ? ", " : "") + fmt_vec(out[i]);
        record(key, s + "]");
        return out;
    }

    std::vector<std::pair<int, int>> index_pairs(const std::string& key, std::vector<std::pair<int, int>> fallback) {
        const toml::Value* v = find(key, true);
        if (v) {
            fallback.clear();
            for (const auto& e : as_array(key, *v)) {
                const auto& pr = as_array(key, e);
                if (pr.size() != 2) fail(key, "entries must be [j, k] pairs");
                const double j = as_number(key, pr[0]);
                const double k = as_number(key, pr[1]);
                for (double c : {j, k})
                    if (c != 0.0 && c != 1.0 && c != 2.0) fail(key, "indices must be 0, 1 or 2");
                fallback.emplace_back(static_cast<int>(j), static_cast<int>(k));
            }
        }
        std::string s = "[";
        for (std::size_t i = 0; i < fallback.size(); ++i)
            s += (i ? ", [" : "[") + std::to_string(fallback[i].first) + ", " + std::to_string(fallback[i].second) + "]";
        record(key, s + "]");
        return fallback;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw ConfigError("[" + name_ + "] " + key + ": " + msg);
    }

    /// Rejects keys that were never read.
    void finish() const {
        if (!table_) return;
        for (const auto& [key, _] : *table_)
            if (!used_.count(key)) throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
    }

    const std::string& name() const { return name_; }

private:
    const toml::Value* find(const std::string& key, bool optional) {
        used_.insert(key);
        if (table_) {
            auto it = table_->find(key);
            if (it != table_->end()) return &it->second;
        }
        if (!optional) fail(key, "missing required key");
        return nullptr;
    }

    double number_silent(const std::string& key, std::optional<int> fallback) {
        const toml::Value* v = find(key, fallback.has_value());
        return v ? as_number(key, *v) : static_cast<double>(*fallback);
    }

    double as_number(const std::string& key, const toml::Value& v) const {
        if (v.type != toml::Value::Type::Number) fail(key, "must be a number");
        if (!std::isfinite(v.number)) fail(key, "must be finite");
        return v.number;
    }
    const std::vector<toml::Value>& as_array(const std::string& key, const toml::Value& v) const {
        if (v.type != toml::Value::Type::Array) fail(key, "must be an array");
        return v.array;
    }
    Vec3 as_vec3(const std::string& key, const toml::Value& v) const {
        const auto& a = as_array(key, v);
        if (a.size() != 3) fail(key, "must be a 3-vector");
        return {as_number(key, a[0]), as_number(key, a[1]), as_number(key, a[2])};
    }
    static std::string fmt_vec(const Vec3& v) {
        return "[" + num(v.x()) + ", " + num(v.y()) + ", " + num(v.z()) + "]";
    }
    void record(const std::string& key, const std::string& value) { echo_.push_back(name_ + "." + key + " = " + value); }

    std::string name_;
    const toml::Table* table_;
    std::vector<std::string>& echo_;
    std::set<std::string> used_;
};

/// Wraps library validation failures so they surface as config errors naming the section.
template <typename F>
auto validated(const std::string& section, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("[" + section + "] " + e.what());
    }
}

struct ModesBlock {
    ModeSet modes;
    int cutoff = 1;
};

inline ModesBlock read_modes(Section& s) {
    if (!s.present()) throw ConfigError("missing required table [modes]");
    const auto ks = s.vectors("wavevectors");
    std::vector<double> pols;
    if (s.has("polarizations")) {
        pols = s.numbers("polarizations");
        if (pols.size() != ks.size()) s.fail("polarizations", "needs one entry per wavevector");
    }
    const double volume = s.number("volume", 1.0);
    const int cutoff = s.integer("cutoff", 1);
    if (cutoff < 1) s.fail("cutoff", "must be >= 1");
    if (!(volume > 0.0)) s.fail("volume", "must be > 0 (got " + num(volume) + ")");
    return validated("modes", [&] {
        std::vector<Mode> modes;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (pols.empty()) {
                modes.push_back(make_mode(ks[i], 1));
                modes.push_back(make_mode(ks[i], 2));
            } else {
                if (pols[i] != 1.0 && pols[i] != 2.0) s.fail("polarizations", "entries must be 1 or 2");
                modes.push_back(make_mode(ks[i], static_cast<int>(pols[i])));
            }
        }
        return ModesBlock{make_mode_set(std::move(modes), volume), cutoff};
    });
}

inline AtomSpec read_atom(Section& s) {
    if (!s.present()) throw ConfigError("missing required table [atom]");
    AtomSpec atom;
    atom.position = s.vec3("position", Vec3::Zero());
    atom.ground_energy = s.number("ground_energy", 0.0);
    atom.coupling = s.number("coupling", 0.01);
    const auto energies = s.numbers("level_energies");
    const std::size_t n = energies.size();
    if (n == 0) s.fail("level_energies", "needs at least one excited level");
    const auto zeros = std::vector<Vec3>(n, Vec3::Zero());
    const auto de = s.vectors("dipole_e", zeros);
    const auto de_im = s.vectors("dipole_e_imag", zeros);
    const auto dm = s.vectors("dipole_m", zeros);
    const auto dm_im = s.vectors("dipole_m_imag", zeros);
    for (const auto* v : {&de, &de_im, &dm, &dm_im})
        if (v->size() != n) s.fail("dipole_e/dipole_m", "needs one 3-vector per excited level");
    for (std::size_t r = 0; r < n; ++r) {
        Transition t;
        t.label = "e" + std::to_string(r + 1);
        t.energy = energies[r];
        t.dipole_e = de[r].cast<cplx>() + cplx{0.0, 1.0} * de_im[r].cast<cplx>();
        t.dipole_m = dm[r].cast<cplx>() + cplx{0.0, 1.0} * dm_im[r].cast<cplx>();
        atom.levels.push_back(t);
    }
    validated("atom", [&] {
        validate_atom(atom);
        return 0;
    });
    return atom;
}

inline TimeWindow read_window(Section& s) {
    const double t0 = s.number("t0", 0.0);
    const double t1 = s.number("t1");
    if (!(t1 > t0)) s.fail("t1", "must exceed t0 (t0 = " + num(t0) + ")");
    return make_window(t0, t1);
}

inline std::size_t read_photon_mode(Section& s, const ModeSet& ms) {
    const int m = s.integer("photon_mode", 0);
    if (m < 0 || static_cast<std::size_t>(m) >= ms.size())
        s.fail("photon_mode", "must lie in [0, " + std::to_string(ms.size() - 1) + "]");
    return static_cast<std::size_t>(m);
}

} // namespace detail

inline RunConfig parse_config_text(const std::string& text) {
    const toml::Document doc = toml::parse(text);
    if (!doc.tables.at("").empty())
        throw ConfigError("key '" + doc.tables.at("").begin()->first + "' appears outside any table");

    static const std::set<std::string> support{"modes", "atom", "output"};
    std::vector<std::string> found;
    for (const auto& name : doc.order) {
        const auto& names = experiment_names();
        if (std::find(names.begin(), names.end(), name) != names.end())
            found.push_back(name);
        else if (!support.count(name))
            throw ConfigError("unknown table [" + name + "]");
    }
    if (found.empty()) throw ConfigError("no experiment table present (expected one of lineshape, mzi, ...)");
    if (found.size() > 1) throw ConfigError("exactly one experiment table allowed, found [" + found[0] + "] and [" + found[1] + "]");

    RunConfig cfg;
    cfg.experiment = found.front();
    const auto table = [&](const std::string& name) -> const toml::Table* {
        auto it = doc.tables.find(name);
        return it == doc.tables.end() ? nullptr : &it->second;
    };
    detail::Section exp(cfg.experiment, table(cfg.experiment), cfg.echo);
    detail::Section modes("modes", table("modes"), cfg.echo);
    detail::Section atom("atom", table("atom"), cfg.echo);
    detail::Section output("output", table("output"), cfg.echo);

    const auto forbid = [&](const detail::Section& s) {
        if (s.present()) throw ConfigError("table [" + s.name() + "] is not used by " + cfg.experiment);
    };

    if (cfg.experiment == "lineshape") {
        forbid(modes);
        forbid(atom);
        LineshapeConfig c;
        c.omega = exp.number("omega");
        c.window = exp.number("window");
        const double lo = exp.number("detuning_min");
        const double hi = exp.number("detuning_max");
        const int pts = exp.integer("detuning_points", 401);
        if (pts < 3) exp.fail("detuning_points", "must be >= 3");
        if (!(hi > lo)) exp.fail("detuning_max", "must exceed detuning_min");
        for (int i = 0; i < pts; ++i) c.detuning_grid.push_back(lo + (hi - lo) * i / (pts - 1));
        c.dipole = exp.vec3("dipole", Vec3::UnitX());
        c.volume = exp.number("volume", 1.0);
        c.coupling = exp.number("coupling", 0.01);
        validate(c);
        cfg.settings = c;
    } else if (cfg.experiment == "mzi") {
        forbid(modes);
        forbid(atom);
        MziConfig c;
        c.wavenumber = exp.number("wavenumber", 1.0);
        c.half_angle = exp.number("half_angle", std::numbers::pi / 4.0);
        c.phase = exp.number("phase", 0.0);
        c.film_z = exp.number("film_z", 0.0);
        const std::string kind = exp.string("detector");
        if (kind == "electric")
            c.detector = DetectorKind::Electric;
        else if (kind == "magnetic")
            c.detector = DetectorKind::Magnetic;
        else
            exp.fail("detector", "must be \"electric\" or \"magnetic\"");
        c.window = exp.number("window", 10.0);
        c.volume = exp.number("volume", 1.0);
        c.coupling = exp.number("coupling", 0.01);
        if (!(c.wavenumber > 0.0)) exp.fail("wavenumber", "must be > 0");
        if (!(c.half_angle > 0.0 && c.half_angle < std::numbers::pi / 2.0))
            exp.fail("half_angle", "must lie in (0, pi/2)");
        c.orientation = exp.vec3("orientation", c.detector == DetectorKind::Electric ? Vec3::UnitY()
                                                                                     : path_magnetic_direction(c, 1));
        const double period = c.fringe_period();
        const double lo = exp.number("scan_min", -2.0 * period);
        const double hi = exp.number("scan_max", 2.0 * period);
        const int pts = exp.integer("scan_points", 256);
        if (pts < 2) exp.fail("scan_points", "must be >= 2");
        if (!(hi > lo)) exp.fail("scan_max", "must exceed scan_min");
        for (int i = 0; i < pts; ++i) c.scan_x.push_back(lo + (hi - lo) * i / (pts - 1));
        validate(c);
        cfg.settings = c;
    } else if (cfg.experiment == "commutator") {
        forbid(atom);
        CommutatorConfig c;
        auto mb = detail::read_modes(modes);
        c.modes = std::move(mb.modes);
        c.cutoff = mb.cutoff;
        c.x = exp.vec3("x", c.x);
        c.y = exp.vec3("y", c.y);
        c.times = exp.numbers("times", c.times);
        if (c.times.empty()) exp.fail("times", "needs at least one time");
        std::vector<std::pair<int, int>> all;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) all.emplace_back(j, k);
        c.components = exp.index_pairs("components", all);
        if (c.components.empty()) exp.fail("components", "needs at least one [j, k] pair");
        if (std::pow(c.cutoff + 1.0, static_cast<double>(c.modes.size())) > 4096)
            exp.fail("modes", "Fock space dimension exceeds 4096");
        cfg.settings = c;
    } else {
        auto mb = detail::read_modes(modes);
        AtomSpec a = detail::read_atom(atom);
        const TimeWindow w = detail::read_window(exp);
        if (std::pow(mb.cutoff + 1.0, static_cast<double>(mb.modes.size())) * a.dimension() > 4096)
            exp.fail("modes", "joint space dimension exceeds 4096");
        if (cfg.experiment == "povm-check") {
            PovmConfig c;
            c.steps = exp.integer("steps", 2000);
            if (c.steps < 1) exp.fail("steps", "must be >= 1");
            c.photon_mode = detail::read_photon_mode(exp, mb.modes);
            c.modes = std::move(mb.modes);
            c.cutoff = mb.cutoff;
            c.atom = std::move(a);
            c.window = w;
            cfg.settings = std::move(c);
        } else {
            ScalingConfig c;
            c.steps = exp.integer("steps", 20000);
            if (c.steps < 1) exp.fail("steps", "must be >= 1");
            c.target = exp.number("target", 1e-4);
            if (!(c.target > 0.0 && c.target < 1.0)) exp.fail("target", "must lie in (0, 1)");
            c.photon_mode = detail::read_photon_mode(exp, mb.modes);
            if (!(a.coupling > 0.0)) atom.fail("coupling", "must be > 0 to seed the scaling study");
            c.modes = std::move(mb.modes);
            c.cutoff = mb.cutoff;
            c.atom = std::move(a);
            c.window = w;
            cfg.settings = std::move(c);
        }
    }
    if (output.present()) cfg.output_path = output.string("path", "");
    for (const auto* s : {&exp, &modes, &atom, &output}) s->finish();
    return cfg;
}

inline RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IOError("failed reading config file '" + path + "'");
    return parse_config_text(ss.str());
}

} // namespace photon_detect
