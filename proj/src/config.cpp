#include "signorini/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

#include "signorini/grid.hpp"

#ifndef SIGNORINI_VERSION
#define SIGNORINI_VERSION "0.0.0"
#endif

namespace signorini {

namespace {

enum class Type { Int, Real, Str, Bool, Reals };

const char* type_name(Type t) {
    switch (t) {
        case Type::Int: return "int";
        case Type::Real: return "real";
        case Type::Str: return "str";
        case Type::Bool: return "bool";
        case Type::Reals: return "reals";
    }
    return "?";
}

using Value = std::variant<long long, double, std::string, bool, std::vector<double>>;

struct Binding {
    std::string section, key;
    Type type;
    std::function<void(ExperimentConfig&, const Value&)> set;
    std::function<Value(const ExperimentConfig&)> get;
};

std::string fmt_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

#define INT_KEY(sec, name, expr)                                                                          \
    Binding { sec, name, Type::Int, [](ExperimentConfig& c, const Value& v) {                            \
        expr = static_cast<std::remove_reference_t<decltype(expr)>>(std::get<long long>(v)); },          \
        [](const ExperimentConfig& c) { return Value(static_cast<long long>(expr)); } }
#define REAL_KEY(sec, name, expr)                                                                        \
    Binding { sec, name, Type::Real, [](ExperimentConfig& c, const Value& v) { expr = std::get<double>(v); }, \
              [](const ExperimentConfig& c) { return Value(static_cast<double>(expr)); } }
#define STR_KEY(sec, name, expr)                                                                         \
    Binding { sec, name, Type::Str, [](ExperimentConfig& c, const Value& v) { expr = std::get<std::string>(v); }, \
              [](const ExperimentConfig& c) { return Value(std::string(expr)); } }
#define REALS_KEY(sec, name, expr)                                                                       \
    Binding { sec, name, Type::Reals,                                                                   \
              [](ExperimentConfig& c, const Value& v) { expr = std::get<std::vector<double>>(v); },      \
              [](const ExperimentConfig& c) { return Value(expr); } }

std::string sweep_name(Sweep s) { return s == Sweep::LineRedBlack ? "line-red-black" : "point-lexicographic"; }

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::vector<Binding>& bindings() {
    static const std::vector<Binding> table = {
        STR_KEY("problem", "name", c.problem.name),
        INT_KEY("problem", "n", c.problem.grid.n),
        REAL_KEY("problem", "a", c.problem.grid.a),
        REAL_KEY("problem", "R", c.problem.grid.R),
        REAL_KEY("problem", "Y", c.problem.grid.Y),
        INT_KEY("problem", "nx", c.problem.grid.nx),
        INT_KEY("problem", "ny", c.problem.grid.ny),
        REAL_KEY("problem", "y_grading", c.problem.grid.y_grading),
        REAL_KEY("problem", "c", c.problem.c),
        REAL_KEY("problem", "theta", c.problem.theta),
        REAL_KEY("problem", "value", c.problem.value),
        REAL_KEY("problem", "f0", c.problem.f0),
        REAL_KEY("problem", "height", c.problem.height),
        REAL_KEY("problem", "slope", c.problem.slope),
        REAL_KEY("problem", "tip", c.problem.tip),
        REAL_KEY("problem", "speed", c.problem.speed),
        REAL_KEY("problem", "x_start", c.problem.x_start),
        REAL_KEY("problem", "t0", c.problem.t0),
        REAL_KEY("problem", "T", c.problem.T),

        REAL_KEY("solver", "tol", c.solver.tol),
        INT_KEY("solver", "max_iter", c.solver.max_iter),
        REAL_KEY("solver", "omega", c.solver.omega),
        REALS_KEY("solver", "epsilon_schedule", c.solver.epsilon_schedule),
        INT_KEY("solver", "nt", c.problem.nt),
        INT_KEY("solver", "check_every", c.solver.check_every),
        Binding{"solver", "sweep", Type::Str,
                [](ExperimentConfig& c, const Value& v) {
                    const auto& s = std::get<std::string>(v);
                    if (s == "line-red-black") c.solver.sweep = Sweep::LineRedBlack;
                    else if (s == "point-lexicographic") c.solver.sweep = Sweep::PointLexicographic;
                    else throw ConfigError("solver.sweep", "expected line-red-black or point-lexicographic, got '" + s + "'");
                },
                [](const ExperimentConfig& c) { return Value(sweep_name(c.solver.sweep)); }},

        Binding{"analysis", "delta", Type::Real,
                [](ExperimentConfig& c, const Value& v) { c.analysis.delta = std::get<double>(v); },
                [](const ExperimentConfig& c) {
                    return Value(c.analysis.delta.value_or(default_delta(c.problem.grid.a)));
                }},
        REAL_KEY("analysis", "sigma", c.analysis.sigma),
        REAL_KEY("analysis", "ell", c.analysis.ell),
        REAL_KEY("analysis", "C_mono", c.analysis.C_mono),
        REAL_KEY("analysis", "C_par", c.analysis.C_par),
        REAL_KEY("analysis", "r_min", c.analysis.r_min),
        REAL_KEY("analysis", "r_max", c.analysis.r_max),
        INT_KEY("analysis", "radii_count", c.analysis.radii_count),
        REAL_KEY("analysis", "class_tol", c.analysis.class_tol),
        REALS_KEY("analysis", "center", c.analysis.center),

        INT_KEY("epi", "count", c.epi.count),
        REAL_KEY("epi", "theta", c.epi.theta),
        REAL_KEY("epi", "theta_max", c.epi.theta_max),
        INT_KEY("epi", "modes", c.epi.modes),
        INT_KEY("epi", "seed", c.epi.seed),
        INT_KEY("epi", "nx", c.epi.nx),
        INT_KEY("epi", "ny", c.epi.ny),
        REAL_KEY("epi", "tol", c.epi.solver.tol),

        REALS_KEY("dtn", "k", c.dtn.k),
        REAL_KEY("dtn", "R", c.dtn.R),
        REAL_KEY("dtn", "Y", c.dtn.Y),
        INT_KEY("dtn", "nx", c.dtn.nx),
        INT_KEY("dtn", "ny", c.dtn.ny),
        INT_KEY("dtn", "levels", c.dtn.levels),

        STR_KEY("output", "directory", c.output.directory),
        Binding{"output", "formats", Type::Str,
                [](ExperimentConfig& c, const Value& v) {
                    c.output.formats.clear();
                    for (auto& f : split(std::get<std::string>(v), ',')) {
                        const auto t = trim(f);
                        if (t != "csv" && t != "json") throw ConfigError("output.formats", "unknown format '" + t + "'");
                        c.output.formats.push_back(t);
                    }
                },
                [](const ExperimentConfig& c) { return Value(join(c.output.formats)); }},
    };
    return table;
}

const Binding* find_binding(const std::string& section, const std::string& key) {
    for (const auto& b : bindings()) {
        if (b.section == section && b.key == key) return &b;
    }
    return nullptr;
}

Value parse_value(Type t, const std::string& raw, const std::string& path) {
    const std::string s = trim(raw);
    auto real = [&](const std::string& tok) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError(path, "not a real number: '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(x)) throw ConfigError(path, "not a real number: '" + tok + "'");
        return x;
    };
    switch (t) {
        case Type::Int: {
            std::size_t used = 0;
            long long x = 0;
            try {
                x = std::stoll(s, &used);
            } catch (const std::exception&) {
                throw ConfigError(path, "not an integer: '" + s + "'");
            }
            if (used != s.size()) throw ConfigError(path, "not an integer: '" + s + "'");
            return x;
        }
        case Type::Real: return real(s);
        case Type::Str: {
            if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
            return s;
        }
        case Type::Bool:
            if (s == "true") return true;
            if (s == "false") return false;
            throw ConfigError(path, "not a bool: '" + s + "'");
        case Type::Reals: {
            std::vector<double> out;
            if (!s.empty()) {
                for (auto& tok : split(s, ',')) out.push_back(real(trim(tok)));
            }
            return out;
        }
    }
    return {};
}

std::string render(const Value& v) {
    struct {
        std::string operator()(long long x) const { return std::to_string(x); }
        std::string operator()(double x) const { return fmt_real(x); }
        std::string operator()(const std::string& x) const { return x; }
        std::string operator()(bool x) const { return x ? "true" : "false"; }
        std::string operator()(const std::vector<double>& x) const {
            std::string out;
            for (std::size_t i = 0; i < x.size(); ++i) out += (i ? "," : "") + fmt_real(x[i]);
            return out;
        }
    } visitor;
    return std::visit(visitor, v);
}

// Library validators report "prefix.field: reason"; rewrite the prefix to the
// config section that owns the field.
[[noreturn]] void rethrow_as_config(const std::exception& e, const std::string& section) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    std::string path = colon == std::string::npos ? section : what.substr(0, colon);
    const std::string reason = colon == std::string::npos ? what : what.substr(colon + 2);
    const auto dot = path.find('.');
    if (dot != std::string::npos) {
        const std::string head = path.substr(0, dot);
        if (head == "grid" || head == "parabolic") path = (head == "grid" ? "problem" : "solver") + path.substr(dot);
    }
    throw ConfigError(path, reason);
}

}  // namespace

FrequencyParams AnalysisConfig::frequency(double a) const {
    FrequencyParams f;
    f.delta = delta.value_or(default_delta(a));
    f.sigma = sigma;
    f.ell = ell;
    f.C_mono = C_mono;
    f.C_par = C_par;
    return f;
}

bool OutputConfig::wants(const std::string& fmt) const {
    return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

ClassifyParams ExperimentConfig::classify_params() const {
    ClassifyParams p;
    p.frequency = frequency();
    p.class_tol = analysis.class_tol;
    p.radii_count = analysis.radii_count;
    p.r_min = analysis.r_min;
    p.r_max = analysis.r_max;
    return p;
}

void ExperimentConfig::validate() const {
    try {
        problem.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rethrow_as_config(e, "problem");
    }
    try {
        solver.validate();
        if (problem.nt < 1) throw std::invalid_argument("solver.nt: need at least one time level");
    } catch (const std::exception& e) {
        rethrow_as_config(e, "solver");
    }
    try {
        frequency().validate(problem.grid.a);
    } catch (const std::exception& e) {
        rethrow_as_config(e, "analysis");
    }
    if (!(analysis.class_tol > 0.0)) throw ConfigError("analysis.class_tol", "must be positive");
    if (analysis.radii_count < 3) throw ConfigError("analysis.radii_count", "need at least 3 radii");
    if (!(analysis.r_min >= 0.0)) throw ConfigError("analysis.r_min", "must be >= 0");
    if (!(analysis.r_max > analysis.r_min)) throw ConfigError("analysis.r_max", "must exceed r_min");
    if (analysis.center.size() != 2) throw ConfigError("analysis.center", "expected two coordinates");
    try {
        EpiParams e = epi;
        e.a = problem.grid.a;
        e.validate();
    } catch (const std::exception& e) {
        rethrow_as_config(e, "epi");
    }
    if (dtn.k.empty()) throw ConfigError("dtn.k", "need at least one wave number");
    for (double k : dtn.k) {
        if (!(k > 0.0)) throw ConfigError("dtn.k", "wave numbers must be positive");
        const double m = k * dtn.R / 3.141592653589793;
        if (std::abs(m - std::round(m)) > 1e-9) throw ConfigError("dtn.k", "k R / pi must be an integer (Neumann box)");
    }
    if (!(dtn.R > 0.0)) throw ConfigError("dtn.R", "must be positive");
    if (!(dtn.Y > 0.0)) throw ConfigError("dtn.Y", "must be positive");
    if (dtn.nx < 3) throw ConfigError("dtn.nx", "need at least 3 nodes");
    if (dtn.ny < 2) throw ConfigError("dtn.ny", "need at least 2 nodes");
    if (dtn.levels < 1) throw ConfigError("dtn.levels", "need at least one level");
    if (output.directory.empty()) throw ConfigError("output.directory", "must not be empty");
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string section;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known{"problem", "solver", "analysis", "epi", "dtn", "output"};
            if (!known.count(section)) throw ConfigError(section, "unknown section (" + where + ")");
            continue;
        }
        if (section.empty()) throw ConfigError(where, "key outside of a section");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected key:type = value");
        const std::string lhs = trim(line.substr(0, eq));
        const auto colon = lhs.find(':');
        if (colon == std::string::npos) throw ConfigError(where, "missing type annotation in '" + lhs + "'");
        const std::string key = trim(lhs.substr(0, colon));
        const std::string tname = trim(lhs.substr(colon + 1));
        const std::string path = section + "." + key;
        const Binding* b = find_binding(section, key);
        if (!b) throw ConfigError(path, "unknown key");
        if (tname != type_name(b->type)) {
            throw ConfigError(path, std::string("expected type ") + type_name(b->type) + ", got " + tname);
        }
        if (!seen.insert(path).second) throw ConfigError(path, "duplicate key");
        b->set(cfg, parse_value(b->type, line.substr(eq + 1), path));
    }
    cfg.epi.a = cfg.problem.grid.a;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, "cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& c) {
    std::vector<std::string> lines;
    for (const auto& b : bindings()) {
        // Where results are written does not change what they are.
        if (b.section == "output" && b.key == "directory") continue;
        lines.push_back(b.section + "." + b.key + ":" + type_name(b.type) + "=" + render(b.get(c)));
    }
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& c) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_config(c))));
    return buf;
}

std::string code_version() { return SIGNORINI_VERSION; }

std::string ExperimentManifest::to_json() const {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["command"] = command;
    j["outputs"] = nlohmann::ordered_json::array();
    for (const auto& o : outputs) {
        j["outputs"].push_back({{"path", o.path}, {"kind", o.kind}, {"description", o.description}});
    }
    j["timings"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : timings) j["timings"][k] = v;
    return j.dump(2) + "\n";
}

ExperimentManifest ExperimentManifest::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ExperimentManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.command = j.value("command", "");
    for (const auto& o : j.at("outputs")) {
        m.outputs.push_back({o.at("path").get<std::string>(), o.at("kind").get<std::string>(),
                             o.value("description", "")});
    }
    for (const auto& [k, v] : j.at("timings").items()) m.timings[k] = v.get<double>();
    return m;
}

bool verify_manifest(const ExperimentManifest& m, const std::string& dir, std::string* problem) {
    auto fail = [&](const std::string& why) {
        if (problem) *problem = why;
        return false;
    };
    for (const auto& o : m.outputs) {
        const auto path = std::filesystem::path(dir) / o.path;
        std::ifstream in(path, std::ios::binary);
        if (!in) return fail("missing " + o.path);
        try {
            if (o.kind == "json") {
                const auto parsed = nlohmann::json::parse(in);
                (void)parsed;
            } else if (o.kind == "csv") {
                std::string header, row;
                if (!std::getline(in, header) || header.empty()) return fail("empty csv " + o.path);
                const auto cols = std::count(header.begin(), header.end(), ',');
                while (std::getline(in, row)) {
                    if (!row.empty() && std::count(row.begin(), row.end(), ',') != cols) {
                        return fail("ragged csv " + o.path);
                    }
                }
            } else if (o.kind == "snapshot") {
                (void)read_snapshot(path.string());
            } else {
                return fail("unknown kind " + o.kind);
            }
        } catch (const std::exception& e) {
            return fail(o.path + ": " + e.what());
        }
    }
    return true;
}

}  // namespace signorini
