#include <algorithm>
#include <fstream>
#include <set>

#include "ensplace/cli.hpp"

namespace ensplace::cli {

namespace {

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.contains(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_number(const Json& obj, const char* key, double fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

std::size_t get_count(const Json& obj, const char* key, std::size_t fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ConfigError(where + "." + key + " must be a nonnegative integer");
    return v.get<std::size_t>();
}

std::string get_string(const Json& obj, const char* key, const std::string& fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

// A complex entry: a number, [re, im] or {"re": .., "im": ..}.
cplx parse_complex(const Json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    if (v.is_object() && v.contains("re")) return {get_number(v, "re", 0.0, where), get_number(v, "im", 0.0, where)};
    throw ConfigError(where + ": expected a number, [re, im] or {re, im}");
}

std::vector<cplx> parse_complex_list(const Json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + " must be an array");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse_complex(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

PoleFamily parse_poles(const Json& j) {
    const std::string where = "ensemble.a";
    check_keys(j, where, {"family", "ratio", "exponent", "scale", "values"});
    const std::string family = get_string(j, "family", "", where);
    if (family == "geometric") return Geometric{get_number(j, "ratio", 0.5, where), get_number(j, "scale", 1.0, where)};
    if (family == "power") return Power{get_number(j, "exponent", 2.0, where), get_number(j, "scale", 1.0, where)};
    if (family == "explicit") {
        if (!j.contains("values") || !j.at("values").is_array()) throw ConfigError(where + ".values must be an array");
        ExplicitPoles e;
        for (const auto& v : j.at("values")) {
            if (!v.is_number()) throw ConfigError(where + ".values must hold real numbers");
            e.values.push_back(v.get<double>());
        }
        return e;
    }
    throw ConfigError(where + ".family must be geometric, power or explicit");
}

InputFamily parse_inputs(const Json& j) {
    const std::string where = "ensemble.b";
    check_keys(j, where, {"family", "ratio", "exponent", "scale", "values"});
    const std::string family = get_string(j, "family", "", where);
    if (family == "geometric") return Geometric{get_number(j, "ratio", 0.5, where), get_number(j, "scale", 1.0, where)};
    if (family == "power") return Power{get_number(j, "exponent", 0.0, where), get_number(j, "scale", 1.0, where)};
    if (family == "explicit") {
        if (!j.contains("values")) throw ConfigError(where + ".values is required");
        return ExplicitInputs{parse_complex_list(j.at("values"), where + ".values")};
    }
    throw ConfigError(where + ".family must be geometric, power or explicit");
}

InitialProfile parse_profile(const std::string& s) {
    if (s == "ones") return InitialProfile::ones;
    if (s == "inverse_b") return InitialProfile::inverse_b;
    if (s == "random") return InitialProfile::random;
    if (s == "basis") return InitialProfile::basis;
    throw ConfigError("simulation.initial must be ones, inverse_b, random or basis");
}

}  // namespace

Json load_config_document(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot read config " + path.string());
    try {
        return Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
}

void apply_override(Json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);

    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    Json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) throw ConfigError("empty path component in override: " + assignment);
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("override path crosses a non-object: " + assignment);
            *node = Json::object();
        }
        node = &(*node)[key];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = std::move(value);
}

RunConfig parse_config(const Json& doc) {
    check_keys(doc, "config", {"ensemble", "targets", "truncation", "simulation", "synth", "feasibility", "output",
                               "strict"});
    RunConfig cfg;

    if (!doc.contains("ensemble")) throw ConfigError("config needs an ensemble section");
    const Json& e = doc.at("ensemble");
    check_keys(e, "ensemble", {"a", "b", "space"});
    if (!e.contains("a") || !e.contains("b")) throw ConfigError("ensemble needs both a and b");
    cfg.ensemble.a = parse_poles(e.at("a"));
    cfg.ensemble.b = parse_inputs(e.at("b"));
    try {
        cfg.ensemble.space = parse_space(get_string(e, "space", "l2", "ensemble"));
    } catch (const InvalidInput& ex) {
        throw ConfigError(ex.what());
    }

    if (doc.contains("targets")) {
        const Json& t = doc.at("targets");
        check_keys(t, "targets", {"mode", "shift", "values"});
        try {
            cfg.targets.mode = parse_target_mode(get_string(t, "mode", "mirror", "targets"));
        } catch (const InvalidInput& ex) {
            throw ConfigError(ex.what());
        }
        cfg.targets.shift = get_number(t, "shift", -1.0, "targets");
        if (t.contains("values")) cfg.targets.values = parse_complex_list(t.at("values"), "targets.values");
    }

    const Json trunc = doc.value("truncation", Json::object());
    check_keys(trunc, "truncation", {"N", "M"});
    cfg.N = get_count(trunc, "N", 16, "truncation");
    if (cfg.N < 1) throw ConfigError("truncation.N must be >= 1");
    cfg.ensemble.N = cfg.N;
    cfg.M = get_count(trunc, "M", default_product_truncation(cfg.ensemble, cfg.N), "truncation");
    if (cfg.M < cfg.N) throw ConfigError("truncation.M must be >= truncation.N");
    cfg.ensemble.N = cfg.M;

    const Json sim = doc.value("simulation", Json::object());
    check_keys(sim, "simulation", {"t_end", "dt", "record_every", "epsilon", "initial", "basis_index", "seed"});
    auto& tc = cfg.simulation.trajectory;
    tc.space = cfg.ensemble.space;
    tc.t_end = get_number(sim, "t_end", 10.0, "simulation");
    if (sim.contains("dt") && !(sim.at("dt").is_string() && sim.at("dt").get<std::string>() == "auto")) {
        tc.dt = get_number(sim, "dt", tc.dt, "simulation");
        cfg.simulation.dt_auto = false;
    }
    tc.record_every = get_count(sim, "record_every", 1, "simulation");
    tc.epsilon = get_number(sim, "epsilon", 0.1, "simulation");
    if (!(tc.t_end > 0.0)) throw ConfigError("simulation.t_end must be positive");
    if (!cfg.simulation.dt_auto && !(tc.dt > 0.0)) throw ConfigError("simulation.dt must be positive");
    if (tc.record_every < 1) throw ConfigError("simulation.record_every must be >= 1");
    if (!(tc.epsilon > 0.0 && tc.epsilon < 1.0)) throw ConfigError("simulation.epsilon must lie in (0,1)");
    cfg.simulation.initial = parse_profile(get_string(sim, "initial", "ones", "simulation"));
    cfg.simulation.basis_index = get_count(sim, "basis_index", 1, "simulation");
    cfg.simulation.seed = get_count(sim, "seed", 1, "simulation");
    if (cfg.simulation.initial == InitialProfile::basis &&
        (cfg.simulation.basis_index < 1 || cfg.simulation.basis_index > cfg.N))
        throw ConfigError("simulation.basis_index must lie in [1, N]");

    if (doc.contains("synth")) {
        const Json& s = doc.at("synth");
        check_keys(s, "synth", {"mode"});
        cfg.synth_mode = get_string(s, "mode", cfg.synth_mode, "synth");
    }

    if (doc.contains("feasibility")) {
        const Json& f = doc.at("feasibility");
        check_keys(f, "feasibility", {"d_grid"});
        if (f.contains("d_grid")) {
            const Json& g = f.at("d_grid");
            if (!g.is_array()) throw ConfigError("feasibility.d_grid must be an array");
            cfg.d_grid.clear();
            for (const auto& v : g) {
                if (!v.is_number() || !(v.get<double>() > 1.0))
                    throw ConfigError("feasibility.d_grid entries must be numbers > 1");
                cfg.d_grid.push_back(v.get<double>());
            }
        }
    }

    if (doc.contains("output")) {
        const Json& o = doc.at("output");
        check_keys(o, "output", {"directory", "formats"});
        cfg.output_dir = get_string(o, "directory", cfg.output_dir.string(), "output");
        if (o.contains("formats")) {
            const Json& fm = o.at("formats");
            if (!fm.is_array()) throw ConfigError("output.formats must be an array");
            cfg.write_json = cfg.write_csv = false;
            for (const auto& v : fm) {
                const std::string f = v.is_string() ? v.get<std::string>() : "";
                if (f == "json") {
                    cfg.write_json = true;
                } else if (f == "csv") {
                    cfg.write_csv = true;
                } else {
                    throw ConfigError("output.formats entries must be json or csv");
                }
            }
        }
    }

    if (doc.contains("strict")) {
        if (!doc.at("strict").is_boolean()) throw ConfigError("strict must be true or false");
        cfg.strict = doc.at("strict").get<bool>();
    }
    return cfg;
}

}  // namespace ensplace::cli
