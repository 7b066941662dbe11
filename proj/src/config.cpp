#include "scalekit/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"
#include "scalekit/convergence.hpp"

namespace scalekit {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

bool TripletSpec::operator==(const TripletSpec& o) const {
    if (sigma2 != o.sigma2 || mu != o.mu || densities != o.densities || atoms.size() != o.atoms.size()) return false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (atoms[i].location != o.atoms[i].location || atoms[i].mass != o.atoms[i].mass) return false;
    }
    return true;
}

std::function<double(double)> named_density(const std::string& name) {
    if (name == "oscillating_tail") {
        return [](double y) {
            const double t = -y;
            return std::exp(std::cos(y)) * (3 + y * std::sin(y)) / (t * t * t * t) + std::numbers::e / (t * t * t);
        };
    }
    if (name == "log_normal") {
        return [](double y) {
            if (!(y > 0.0)) return 0.0;
            const double l = std::log(y);
            return std::exp(-l * l / 2) / (std::sqrt(2 * std::numbers::pi) * y);
        };
    }
    throw ConfigError("unknown named density '" + name + "'");
}

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(where, "expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j.items()) {
        if (!ok.count(k)) fail(where, "unknown key '" + k + "'");
    }
}

double number(const json& j, const std::string& where, bool allow_inf = false) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (allow_inf && s == "-inf") return -kInf;
        if (allow_inf && s == "inf") return kInf;
        fail(where, "expected a number, got '" + s + "'");
    }
    if (!j.is_number()) fail(where, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(where, "must be finite");
    return v;
}

double number_or(const json& j, const char* key, double dflt, const std::string& where, bool allow_inf = false) {
    return j.contains(key) ? number(j.at(key), where + "." + key, allow_inf) : dflt;
}

double finite_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(where, std::string("missing '") + key + "'");
    return number(j.at(key), where + "." + key);
}

std::vector<double> numbers(const json& j, const std::string& where) {
    // A list, or {"dyadic": [from, to]} for 2^-from .. 2^-to.
    if (j.is_object()) {
        only_keys(j, where, {"dyadic"});
        const auto& d = j.at("dyadic");
        if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() || !d[1].is_number_integer()) {
            fail(where, "dyadic needs two integers");
        }
        const int from = d[0].get<int>(), to = d[1].get<int>();
        if (from > to || to - from > 40) fail(where, "bad dyadic range");
        return dyadic(from, to);
    }
    if (!j.is_array()) fail(where, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::string text(const json& j, const char* key, const std::string& dflt, const std::string& where) {
    if (!j.contains(key)) return dflt;
    if (!j.at(key).is_string()) fail(where + "." + key, "expected a string");
    return j.at(key).get<std::string>();
}

bool flag(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return false;
    if (!j.at(key).is_boolean()) fail(where + "." + key, "expected true or false");
    return j.at(key).get<bool>();
}

DensitySpec parse_density(const json& j, const std::string& where) {
    DensitySpec d;
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) fail(where, "density needs a 'kind'");
    d.kind = j.at("kind").get<std::string>();
    d.lo = number_or(j, "lo", -kInf, where, true);
    d.hi = number_or(j, "hi", 0.0, where, true);
    if (d.kind == "power_law") {
        only_keys(j, where, {"kind", "coef", "beta", "lo", "hi"});
        d.coef = finite_number(j, "coef", where);
        d.beta = finite_number(j, "beta", where);
    } else if (d.kind == "shifted_power") {
        only_keys(j, where, {"kind", "coef", "exponent", "anchor", "lo", "hi"});
        d.coef = finite_number(j, "coef", where);
        d.exponent = finite_number(j, "exponent", where);
        d.anchor = finite_number(j, "anchor", where);
    } else if (d.kind == "exponential") {
        only_keys(j, where, {"kind", "a", "rho", "lo", "hi"});
        d.a = finite_number(j, "a", where);
        d.rho = finite_number(j, "rho", where);
    } else if (d.kind == "log_normal") {
        only_keys(j, where, {"kind", "weight", "lo", "hi"});
        d.weight = number_or(j, "weight", 1.0, where);
    } else if (d.kind == "named") {
        only_keys(j, where, {"kind", "name", "lo", "hi"});
        d.name = text(j, "name", "", where);
        named_density(d.name);
    } else {
        fail(where, "unknown density kind '" + d.kind + "'");
    }
    return d;
}

TripletSpec parse_triplet(const json& j) {
    const std::string where = "triplet";
    only_keys(j, where, {"sigma2", "mu", "atoms", "densities"});
    TripletSpec t;
    t.sigma2 = number_or(j, "sigma2", 0.0, where);
    t.mu = finite_number(j, "mu", where);
    if (j.contains("atoms")) {
        const auto& atoms = j.at("atoms");
        if (!atoms.is_array()) fail(where + ".atoms", "expected a list");
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const std::string w = where + ".atoms[" + std::to_string(i) + "]";
            only_keys(atoms[i], w, {"location", "mass"});
            t.atoms.push_back({finite_number(atoms[i], "location", w), finite_number(atoms[i], "mass", w)});
        }
    }
    if (j.contains("densities")) {
        const auto& ds = j.at("densities");
        if (!ds.is_array()) fail(where + ".densities", "expected a list");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            t.densities.push_back(parse_density(ds[i], where + ".densities[" + std::to_string(i) + "]"));
        }
    }
    return t;
}

void require_on_grid(double x, double h, const std::string& where) {
    try {
        grid_index(x, h);
    } catch (const ArgumentError& e) {
        fail(where, e.what());
    }
}

bool is_power_of_two(double h) {
    int e = 0;
    return std::frexp(h, &e) == 0.5;
}

void validate(RunConfig& c) {
    static const std::set<std::string> commands{"scale", "sweep", "ruin", "cbi", "diagnose"};
    if (c.schema_version != kSchemaVersion) fail("schema_version", "unsupported version");
    if (!commands.count(c.command)) fail("command", "unknown command '" + c.command + "'");
    if (c.q.empty()) fail("q", "needs at least one value");
    for (double q : c.q) {
        if (!(q >= 0.0)) fail("q", "values must be nonnegative");
    }
    try {
        build_triplet(c.triplet);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        fail("triplet", e.what());
    }
    if (c.output.empty()) fail("output", "empty prefix");

    const bool needs_h = c.command == "scale" || c.command == "ruin" || c.command == "cbi";
    if (needs_h && !(c.h > 0.0)) fail("h", "must be positive");
    if (c.command == "scale") {
        if (!(c.x_max > 0.0)) fail("x_max", "must be positive");
        require_on_grid(c.x_max, c.h, "x_max");
    }
    if (c.command == "sweep") {
        if (!c.sweep) fail("sweep", "section required for the sweep command");
        auto& s = *c.sweep;
        static const std::set<std::string> oracles{"bm", "cp", "stable", "benchmark"};
        static const std::set<std::string> cases{"", "bm_w", "bm_z", "cp_w", "cp_z"};
        if (!oracles.count(s.oracle)) fail("sweep.oracle", "unknown oracle '" + s.oracle + "'");
        if (!cases.count(s.sharpness)) fail("sweep.sharpness", "unknown case '" + s.sharpness + "'");
        if (s.hs.size() < 3) fail("sweep.hs", "needs at least three steps");
        if (!s.sharpness.empty()) {
            for (double h : s.hs) {
                if (!is_power_of_two(h)) fail("sweep.hs", "sharpness comparison needs dyadic steps");
            }
        }
        if (s.oracle == "benchmark" && s.benchmark_h == 0.0) s.benchmark_h = s.hs.back() / 16;
        Oracle probe{"probe", s.oracle == "benchmark" ? s.benchmark_h : 0.0, [](double) { return 0.0; }, {}};
        try {
            validate_sweep(s.K, s.hs, probe);
        } catch (const ArgumentError& e) {
            fail("sweep", e.what());
        }
    }
    if (c.command == "ruin") {
        if (!c.ruin) fail("ruin", "section required for the ruin command");
        const auto& r = *c.ruin;
        if (!(r.x > 0.0 && r.x < r.a)) fail("ruin", "needs 0 < x < a");
        require_on_grid(r.x, c.h, "ruin.x");
        require_on_grid(r.a, c.h, "ruin.a");
        if (r.y.empty()) fail("ruin.y", "needs deficit points");
        for (double y : r.y) {
            if (!(y > 0.0)) fail("ruin.y", "deficit points must be positive");
        }
        named_density(r.claim_density);
    }
    if (c.command == "cbi") {
        if (!c.cbi) fail("cbi", "section required for the cbi command");
        const auto& b = *c.cbi;
        if (!(b.b >= 0.0)) fail("cbi.b", "must be nonnegative");
        if (b.measure != "exponential" && b.measure != "zero") fail("cbi.measure", "unknown measure");
        if (b.measure == "exponential" && !(b.intensity >= 0.0 && b.rate > 0.0)) {
            fail("cbi", "exponential measure needs intensity >= 0 and rate > 0");
        }
        if (b.xs.empty()) fail("cbi.xs", "needs evaluation points");
        for (double x : b.xs) {
            if (!(x > 0.0)) fail("cbi.xs", "points must be positive");
            require_on_grid(x, c.h, "cbi.xs");
        }
    }
    if (c.command == "diagnose") {
        if (!c.diagnose) c.diagnose = DiagnoseSpec{};
        auto& d = *c.diagnose;
        if (d.deltas.empty()) d.deltas = dyadic(1, 20);
        if (d.candidates.empty()) d.candidates = dyadic(0, 12);
        for (double x : d.deltas) {
            if (!(x > 0.0 && x <= 1.0)) fail("diagnose.deltas", "values must lie in (0, 1]");
        }
        for (std::size_t i = 0; i < d.candidates.size(); ++i) {
            if (!(d.candidates[i] > 0.0)) fail("diagnose.candidates", "must be positive");
            if (i > 0 && !(d.candidates[i] < d.candidates[i - 1])) fail("diagnose.candidates", "must descend");
        }
    }
}

ojson number_out(double v) {
    if (v == -kInf) return "-inf";
    if (v == kInf) return "inf";
    return v;
}

}  // namespace

LevyTriplet build_triplet(const TripletSpec& spec) {
    std::vector<DensityPiece> pieces;
    for (const auto& d : spec.densities) {
        if (d.kind == "power_law") {
            pieces.push_back(DensityPiece::power_law(d.coef, d.beta, d.lo, d.hi));
        } else if (d.kind == "shifted_power") {
            pieces.push_back(DensityPiece::shifted_power(d.coef, d.exponent, d.anchor, d.lo, d.hi));
        } else if (d.kind == "exponential") {
            pieces.push_back(DensityPiece::exponential(d.a, d.rho, d.lo, d.hi));
        } else if (d.kind == "log_normal") {
            pieces.push_back(DensityPiece::log_normal(d.weight, d.lo, d.hi));
        } else if (d.kind == "named") {
            pieces.push_back(DensityPiece::generic(named_density(d.name), d.lo, d.hi, d.name));
        } else {
            throw ConfigError("unknown density kind '" + d.kind + "'");
        }
    }
    return LevyTriplet(spec.sigma2, LevyMeasure(spec.atoms, std::move(pieces)), spec.mu);
}

RunConfig parse_config(const std::string& content, const std::string& command) {
    json j;
    try {
        j = json::parse(content);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    only_keys(j, "config",
              {"schema_version", "command", "triplet", "q", "h", "x_max", "flags", "output", "sweep", "ruin", "cbi",
               "diagnose"});
    RunConfig c;
    try {
        if (j.contains("schema_version")) {
            if (!j.at("schema_version").is_number_integer()) fail("schema_version", "expected an integer");
            c.schema_version = j.at("schema_version").get<int>();
        }
        c.command = text(j, "command", command, "config");
        if (!command.empty() && c.command != command) {
            fail("command", "config is for '" + c.command + "' but '" + command + "' was requested");
        }
        if (!j.contains("triplet")) fail("config", "missing 'triplet'");
        c.triplet = parse_triplet(j.at("triplet"));
        if (j.contains("q")) {
            c.q = j.at("q").is_array() ? numbers(j.at("q"), "q") : std::vector<double>{number(j.at("q"), "q")};
        }
        c.h = number_or(j, "h", 0.0, "config");
        c.x_max = number_or(j, "x_max", 0.0, "config");
        if (j.contains("flags")) {
            const auto& f = j.at("flags");
            only_keys(f, "flags", {"compensated", "cross_check"});
            c.compensated = flag(f, "compensated", "flags");
            c.cross_check = flag(f, "cross_check", "flags");
        }
        c.output = text(j, "output", c.output, "config");
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            only_keys(s, "sweep", {"hs", "K", "oracle", "benchmark_h", "sharpness"});
            SweepSpec sw;
            if (s.contains("hs")) sw.hs = numbers(s.at("hs"), "sweep.hs");
            if (s.contains("K")) sw.K = numbers(s.at("K"), "sweep.K");
            sw.oracle = text(s, "oracle", sw.oracle, "sweep");
            sw.benchmark_h = number_or(s, "benchmark_h", 0.0, "sweep");
            sw.sharpness = text(s, "sharpness", "", "sweep");
            c.sweep = sw;
        }
        if (j.contains("ruin")) {
            const auto& r = j.at("ruin");
            only_keys(r, "ruin", {"x", "a", "y", "claim_density"});
            RuinSpec rs;
            rs.x = finite_number(r, "x", "ruin");
            rs.a = finite_number(r, "a", "ruin");
            if (r.contains("y")) rs.y = numbers(r.at("y"), "ruin.y");
            rs.claim_density = text(r, "claim_density", rs.claim_density, "ruin");
            c.ruin = rs;
        }
        if (j.contains("cbi")) {
            const auto& b = j.at("cbi");
            only_keys(b, "cbi", {"b", "measure", "intensity", "rate", "xs"});
            CbiSpec cs;
            cs.b = number_or(b, "b", 1.0, "cbi");
            cs.measure = text(b, "measure", cs.measure, "cbi");
            cs.intensity = number_or(b, "intensity", 1.0, "cbi");
            cs.rate = number_or(b, "rate", 1.0, "cbi");
            if (b.contains("xs")) cs.xs = numbers(b.at("xs"), "cbi.xs");
            c.cbi = cs;
        }
        if (j.contains("diagnose")) {
            const auto& d = j.at("diagnose");
            only_keys(d, "diagnose", {"deltas", "candidates"});
            DiagnoseSpec ds;
            if (d.contains("deltas")) ds.deltas = numbers(d.at("deltas"), "diagnose.deltas");
            if (d.contains("candidates")) ds.candidates = numbers(d.at("candidates"), "diagnose.candidates");
            c.diagnose = ds;
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config type error: ") + e.what());
    }
    validate(c);
    return c;
}

RunConfig load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), command);
}

std::string serialize_config(const RunConfig& c) {
    ojson j;
    j["schema_version"] = c.schema_version;
    j["command"] = c.command;
    ojson t;
    t["sigma2"] = c.triplet.sigma2;
    t["mu"] = c.triplet.mu;
    t["atoms"] = ojson::array();
    for (const auto& a : c.triplet.atoms) t["atoms"].push_back({{"location", a.location}, {"mass", a.mass}});
    t["densities"] = ojson::array();
    for (const auto& d : c.triplet.densities) {
        ojson p;
        p["kind"] = d.kind;
        if (d.kind == "power_law") {
            p["coef"] = d.coef;
            p["beta"] = d.beta;
        } else if (d.kind == "shifted_power") {
            p["coef"] = d.coef;
            p["exponent"] = d.exponent;
            p["anchor"] = d.anchor;
        } else if (d.kind == "exponential") {
            p["a"] = d.a;
            p["rho"] = d.rho;
        } else if (d.kind == "log_normal") {
            p["weight"] = d.weight;
        } else if (d.kind == "named") {
            p["name"] = d.name;
        }
        p["lo"] = number_out(d.lo);
        p["hi"] = number_out(d.hi);
        t["densities"].push_back(p);
    }
    j["triplet"] = t;
    j["q"] = c.q;
    j["h"] = c.h;
    j["x_max"] = c.x_max;
    j["flags"] = {{"compensated", c.compensated}, {"cross_check", c.cross_check}};
    j["output"] = c.output;
    if (c.sweep) {
        j["sweep"] = {{"hs", c.sweep->hs},
                      {"K", c.sweep->K},
                      {"oracle", c.sweep->oracle},
                      {"benchmark_h", c.sweep->benchmark_h},
                      {"sharpness", c.sweep->sharpness}};
    }
    if (c.ruin) {
        j["ruin"] = {{"x", c.ruin->x}, {"a", c.ruin->a}, {"y", c.ruin->y}, {"claim_density", c.ruin->claim_density}};
    }
    if (c.cbi) {
        j["cbi"] = {{"b", c.cbi->b},
                    {"measure", c.cbi->measure},
                    {"intensity", c.cbi->intensity},
                    {"rate", c.cbi->rate},
                    {"xs", c.cbi->xs}};
    }
    if (c.diagnose) j["diagnose"] = {{"deltas", c.diagnose->deltas}, {"candidates", c.diagnose->candidates}};
    return j.dump(2) + "\n";
}

}  // namespace scalekit
