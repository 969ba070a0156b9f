#include "qbnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace qbnet {

using nlohmann::json;

namespace {

std::string key_path(const std::string& parent, std::string_view key) { return parent + "." + std::string(key); }
std::string index_path(const std::string& parent, std::size_t i) { return parent + "[" + std::to_string(i) + "]"; }

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw ConfigError(key_path(path, key), "unknown key");
        }
    }
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) {
        throw ConfigError(path, "expected a number");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw ConfigError(path, "expected a finite number");
    }
    return x;
}

double get_nonnegative(const json& v, const std::string& path) {
    const double x = get_number(v, path);
    if (x < 0.0) {
        throw ConfigError(path, "expected a non-negative number");
    }
    return x;
}

int get_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) {
        throw ConfigError(path, "expected an integer");
    }
    return v.get<int>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    return v.get<std::string>();
}

complex get_complex(const json& v, const std::string& path) {
    if (v.is_number()) {
        return {get_number(v, path), 0.0};
    }
    if (v.is_array() && v.size() == 2) {
        return {get_number(v[0], index_path(path, 0)), get_number(v[1], index_path(path, 1))};
    }
    throw ConfigError(path, "expected a number or a [re, im] pair");
}

std::vector<double> get_number_list(const json& v, const std::string& path, bool nonnegative) {
    if (!v.is_array()) {
        throw ConfigError(path, "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(nonnegative ? get_nonnegative(v[i], index_path(path, i)) : get_number(v[i], index_path(path, i)));
    }
    return out;
}

template <typename Parse>
auto parse_enum(const json& v, const std::string& path, Parse parse) {
    const std::string text = get_string(v, path);
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
}

TopologyParams parse_topology(const json& obj, const std::string& path) {
    reject_unknown(obj, path,
                   {"family", "variant", "n", "gb", "gamma", "gamma_c", "gamma_b", "big_gamma", "xi", "thetas"});
    for (const auto* required : {"family", "variant", "n", "gb"}) {
        if (!obj.contains(required)) {
            throw ConfigError(key_path(path, required), "missing required key");
        }
    }
    TopologyParams p;
    p.family = parse_enum(obj["family"], key_path(path, "family"), parse_family);
    p.variant = parse_enum(obj["variant"], key_path(path, "variant"), parse_variant);
    p.n = get_int(obj["n"], key_path(path, "n"));
    if (p.n < 1) {
        throw ConfigError(key_path(path, "n"), "battery count must be >= 1");
    }
    p.g_b = get_nonnegative(obj["gb"], key_path(path, "gb"));

    if (obj.contains("gamma")) {
        if (obj.contains("gamma_c") || obj.contains("gamma_b")) {
            throw ConfigError(key_path(path, "gamma"), "give either gamma or gamma_c/gamma_b, not both");
        }
        const double g = get_nonnegative(obj["gamma"], key_path(path, "gamma"));
        p.gamma_c = g;
        p.gamma_b.assign(static_cast<std::size_t>(p.n), g);
    } else {
        if (!obj.contains("gamma_c") || !obj.contains("gamma_b")) {
            throw ConfigError(key_path(path, "gamma"), "missing decay rates (gamma, or gamma_c and gamma_b)");
        }
        p.gamma_c = get_nonnegative(obj["gamma_c"], key_path(path, "gamma_c"));
        const json& gb = obj["gamma_b"];
        if (gb.is_number()) {
            p.gamma_b.assign(static_cast<std::size_t>(p.n), get_nonnegative(gb, key_path(path, "gamma_b")));
        } else {
            p.gamma_b = get_number_list(gb, key_path(path, "gamma_b"), true);
            if (p.gamma_b.size() != static_cast<std::size_t>(p.n)) {
                throw ConfigError(key_path(path, "gamma_b"), "expected " + std::to_string(p.n) + " entries");
            }
        }
    }
    if (obj.contains("big_gamma")) {
        p.big_gamma = get_nonnegative(obj["big_gamma"], key_path(path, "big_gamma"));
    } else if (p.variant != Variant::r1) {
        throw ConfigError(key_path(path, "big_gamma"), "required for variants with intermediate modes");
    }
    if (obj.contains("xi")) {
        p.xi = get_complex(obj["xi"], key_path(path, "xi"));
    }
    if (obj.contains("thetas")) {
        p.thetas = get_number_list(obj["thetas"], key_path(path, "thetas"), false);
        if (p.thetas.size() != static_cast<std::size_t>(p.n)) {
            throw ConfigError(key_path(path, "thetas"), "expected " + std::to_string(p.n) + " entries");
        }
    } else if (p.variant == Variant::custom) {
        throw ConfigError(key_path(path, "thetas"), "required for variant custom");
    }
    return p;
}

NetworkSpec parse_network(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"modes", "couplings", "drives"});
    NetworkSpec spec;
    if (!obj.contains("modes") || !obj["modes"].is_array()) {
        throw ConfigError(key_path(path, "modes"), "expected an array of modes");
    }
    const json& modes = obj["modes"];
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string mp = index_path(key_path(path, "modes"), i);
        reject_unknown(modes[i], mp, {"id", "role", "decay_rate", "detuning"});
        ModeSpec m;
        if (!modes[i].contains("id")) throw ConfigError(key_path(mp, "id"), "missing required key");
        m.id = get_string(modes[i]["id"], key_path(mp, "id"));
        if (modes[i].contains("role")) m.role = parse_enum(modes[i]["role"], key_path(mp, "role"), parse_role);
        if (!modes[i].contains("decay_rate")) throw ConfigError(key_path(mp, "decay_rate"), "missing required key");
        m.decay_rate = get_nonnegative(modes[i]["decay_rate"], key_path(mp, "decay_rate"));
        if (modes[i].contains("detuning")) m.detuning = get_number(modes[i]["detuning"], key_path(mp, "detuning"));
        spec.modes.push_back(std::move(m));
    }
    if (obj.contains("couplings")) {
        const json& cs = obj["couplings"];
        if (!cs.is_array()) throw ConfigError(key_path(path, "couplings"), "expected an array");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            const std::string cp = index_path(key_path(path, "couplings"), i);
            reject_unknown(cs[i], cp, {"source", "target", "strength", "phase"});
            for (const auto* required : {"source", "target", "strength"}) {
                if (!cs[i].contains(required)) throw ConfigError(key_path(cp, required), "missing required key");
            }
            CouplingSpec c;
            c.source = get_string(cs[i]["source"], key_path(cp, "source"));
            c.target = get_string(cs[i]["target"], key_path(cp, "target"));
            c.strength = get_nonnegative(cs[i]["strength"], key_path(cp, "strength"));
            if (cs[i].contains("phase")) c.phase = get_number(cs[i]["phase"], key_path(cp, "phase"));
            spec.couplings.push_back(std::move(c));
        }
    }
    if (obj.contains("drives")) {
        const json& ds = obj["drives"];
        if (!ds.is_array()) throw ConfigError(key_path(path, "drives"), "expected an array");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const std::string dp = index_path(key_path(path, "drives"), i);
            reject_unknown(ds[i], dp, {"mode", "amplitude"});
            for (const auto* required : {"mode", "amplitude"}) {
                if (!ds[i].contains(required)) throw ConfigError(key_path(dp, required), "missing required key");
            }
            spec.drives.push_back({get_string(ds[i]["mode"], key_path(dp, "mode")),
                                   get_complex(ds[i]["amplitude"], key_path(dp, "amplitude"))});
        }
    }
    return spec;
}

TimeGrid parse_times(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"start", "stop", "points"});
    TimeGrid g;
    if (obj.contains("start")) g.start = get_nonnegative(obj["start"], key_path(path, "start"));
    if (!obj.contains("stop")) throw ConfigError(key_path(path, "stop"), "missing required key");
    if (!obj.contains("points")) throw ConfigError(key_path(path, "points"), "missing required key");
    g.stop = get_nonnegative(obj["stop"], key_path(path, "stop"));
    g.points = get_int(obj["points"], key_path(path, "points"));
    if (g.points < 1) throw ConfigError(key_path(path, "points"), "expected at least one point");
    if (g.points > 1 && !(g.stop > g.start)) throw ConfigError(key_path(path, "stop"), "must exceed start");
    return g;
}

SweepSpec parse_sweep(const json& obj, const std::string& path) {
    reject_unknown(obj, path, {"variable", "index", "start", "stop", "points", "scale", "observables"});
    for (const auto* required : {"variable", "start", "stop", "points"}) {
        if (!obj.contains(required)) throw ConfigError(key_path(path, required), "missing required key");
    }
    SweepSpec s;
    s.variable = parse_enum(obj["variable"], key_path(path, "variable"), parse_sweep_variable);
    if (obj.contains("index")) {
        s.index = get_int(obj["index"], key_path(path, "index"));
        if (s.index < 1) throw ConfigError(key_path(path, "index"), "coupling index is 1-based");
    }
    s.start = get_number(obj["start"], key_path(path, "start"));
    s.stop = get_number(obj["stop"], key_path(path, "stop"));
    s.points = get_int(obj["points"], key_path(path, "points"));
    if (s.points < 0) throw ConfigError(key_path(path, "points"), "expected a non-negative count");
    if (obj.contains("scale")) {
        const std::string scale = get_string(obj["scale"], key_path(path, "scale"));
        if (scale != "linear" && scale != "log") {
            throw ConfigError(key_path(path, "scale"), "expected linear or log");
        }
        s.log_scale = scale == "log";
        if (s.log_scale && s.points > 0 && !(s.start > 0.0 && s.stop > 0.0)) {
            throw ConfigError(key_path(path, "start"), "log sweeps need positive bounds");
        }
    }
    if (obj.contains("observables")) {
        const json& obs = obj["observables"];
        if (!obs.is_array() || obs.empty()) {
            throw ConfigError(key_path(path, "observables"), "expected a non-empty array of names");
        }
        s.observables.clear();
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const std::string name = get_string(obs[i], index_path(key_path(path, "observables"), i));
            if (std::find(sweep_observables.begin(), sweep_observables.end(), name) == sweep_observables.end()) {
                throw ConfigError(index_path(key_path(path, "observables"), i), "unknown observable '" + name + "'");
            }
            s.observables.push_back(name);
        }
    }
    return s;
}

}  // namespace

std::vector<double> TimeGrid::values() const {
    std::vector<double> out(static_cast<std::size_t>(std::max(points, 0)));
    for (int i = 0; i < points; ++i) {
        out[static_cast<std::size_t>(i)] =
            points == 1 ? start : (i + 1 == points ? stop : start + (stop - start) * i / (points - 1));
    }
    return out;
}

std::vector<double> SweepSpec::values() const {
    std::vector<double> out(static_cast<std::size_t>(std::max(points, 0)));
    for (int i = 0; i < points; ++i) {
        double v = start;
        if (points > 1) {
            const double frac = static_cast<double>(i) / (points - 1);
            v = log_scale ? std::exp(std::log(start) + frac * (std::log(stop) - std::log(start)))
                          : start + frac * (stop - start);
            if (i == 0) v = start;
            if (i + 1 == points) v = stop;
        }
        out[static_cast<std::size_t>(i)] = v;
    }
    return out;
}

std::string_view to_string(SweepVariable v) {
    switch (v) {
        case SweepVariable::g_b: return "gb";
        case SweepVariable::theta: return "theta";
        case SweepVariable::n: return "n";
        case SweepVariable::gamma: return "gamma";
        case SweepVariable::big_gamma: return "big_gamma";
        case SweepVariable::xi: return "xi";
    }
    return "?";
}

SweepVariable parse_sweep_variable(std::string_view text) {
    for (const auto v : {SweepVariable::g_b, SweepVariable::theta, SweepVariable::n, SweepVariable::gamma,
                         SweepVariable::big_gamma, SweepVariable::xi}) {
        if (text == to_string(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown sweep variable '" + std::string(text) +
                                "' (expected gb|theta|n|gamma|big_gamma|xi)");
}

RunConfig parse_config(const json& doc) {
    const std::string root = "$";
    reject_unknown(doc, root, {"topology", "network", "target", "times", "sweep", "landscape_points", "output"});
    RunConfig c;
    if (doc.contains("topology")) c.topology = parse_topology(doc["topology"], key_path(root, "topology"));
    if (doc.contains("network")) c.network = parse_network(doc["network"], key_path(root, "network"));
    if (c.topology && c.network) {
        throw ConfigError(key_path(root, "network"), "give either topology or network, not both");
    }
    if (doc.contains("target")) c.target = get_string(doc["target"], key_path(root, "target"));
    if (doc.contains("times")) c.times = parse_times(doc["times"], key_path(root, "times"));
    if (doc.contains("sweep")) c.sweep = parse_sweep(doc["sweep"], key_path(root, "sweep"));
    if (doc.contains("landscape_points")) {
        c.landscape_points = get_int(doc["landscape_points"], key_path(root, "landscape_points"));
        if (*c.landscape_points < 21) {
            throw ConfigError(key_path(root, "landscape_points"), "need at least 21 points per axis");
        }
    }
    if (doc.contains("output")) {
        const std::string op = key_path(root, "output");
        reject_unknown(doc["output"], op, {"dir", "format"});
        if (doc["output"].contains("dir")) c.out_dir = get_string(doc["output"]["dir"], key_path(op, "dir"));
        if (doc["output"].contains("format")) {
            c.format = get_string(doc["output"]["format"], key_path(op, "format"));
            if (*c.format != "csv" && *c.format != "json") {
                throw ConfigError(key_path(op, "format"), "expected csv or json");
            }
        }
    }
    return c;
}

RunConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("$", "cannot read config file '" + file.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

json to_json(const TopologyParams& p) {
    json j;
    j["family"] = std::string(to_string(p.family));
    j["variant"] = std::string(to_string(p.variant));
    j["n"] = p.n;
    j["gb"] = p.g_b;
    j["gamma_c"] = p.gamma_c;
    j["gamma_b"] = p.gamma_b;
    j["big_gamma"] = p.big_gamma;
    j["xi"] = json::array({p.xi.real(), p.xi.imag()});
    if (!p.thetas.empty()) {
        j["thetas"] = p.thetas;
    }
    return j;
}

json to_json(const NetworkSpec& spec) {
    json j;
    j["modes"] = json::array();
    for (const auto& m : spec.modes) {
        j["modes"].push_back({{"id", m.id},
                              {"role", std::string(to_string(m.role))},
                              {"decay_rate", m.decay_rate},
                              {"detuning", m.detuning}});
    }
    j["couplings"] = json::array();
    for (const auto& c : spec.couplings) {
        j["couplings"].push_back(
            {{"source", c.source}, {"target", c.target}, {"strength", c.strength}, {"phase", c.phase}});
    }
    j["drives"] = json::array();
    for (const auto& d : spec.drives) {
        j["drives"].push_back({{"mode", d.mode}, {"amplitude", json::array({d.amplitude.real(), d.amplitude.imag()})}});
    }
    return j;
}

json to_json(const RunConfig& c) {
    json j = json::object();
    if (c.topology) j["topology"] = to_json(*c.topology);
    if (c.network) j["network"] = to_json(*c.network);
    if (c.target) j["target"] = *c.target;
    if (c.times) j["times"] = {{"start", c.times->start}, {"stop", c.times->stop}, {"points", c.times->points}};
    if (c.sweep) {
        j["sweep"] = {{"variable", std::string(to_string(c.sweep->variable))},
                      {"index", c.sweep->index},
                      {"start", c.sweep->start},
                      {"stop", c.sweep->stop},
                      {"points", c.sweep->points},
                      {"scale", c.sweep->log_scale ? "log" : "linear"},
                      {"observables", c.sweep->observables}};
    }
    if (c.landscape_points) j["landscape_points"] = *c.landscape_points;
    if (c.out_dir || c.format) {
        json out = json::object();
        if (c.out_dir) out["dir"] = *c.out_dir;
        if (c.format) out["format"] = *c.format;
        j["output"] = out;
    }
    return j;
}

std::string serialize(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace qbnet
