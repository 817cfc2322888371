#include "trap/cli/manifest.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

namespace trap::cli {

using nlohmann::json;

std::string to_string(Kind k) {
    switch (k) {
    case Kind::sample: return "sample";
    case Kind::spectrum: return "spectrum";
    case Kind::aging: return "aging";
    case Kind::mc: return "mc";
    case Kind::ppp: return "ppp";
    case Kind::tauber: return "tauber";
    case Kind::validate: return "validate";
    }
    return "sample";
}

Kind kind_from_string(const std::string& s) {
    for (Kind k : {Kind::sample, Kind::spectrum, Kind::aging, Kind::mc, Kind::ppp, Kind::tauber, Kind::validate})
        if (to_string(k) == s) return k;
    throw ValidationError("unknown experiment kind '" + s + "'");
}

std::vector<double> log_grid(double lo, double hi, int n) {
    if (n == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace {

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

enum class Type { real, count, seed, text, real_list };

struct Param {
    std::string name;
    Type type;
    json fallback;
    // Range check on the (type-checked) value; returns an error or "".
    std::function<std::string(const json&)> check;
};

std::function<std::string(const json&)> open_interval(double lo, double hi) {
    return [=](const json& v) {
        const double x = v.get<double>();
        return x > lo && x < hi ? "" : "must lie in (" + g(lo) + ", " + g(hi) + ")";
    };
}

std::function<std::string(const json&)> at_least(double lo) {
    return [=](const json& v) {
        if (v.is_array()) {
            if (v.empty()) return std::string("must not be empty");
            for (const auto& e : v)
                if (!(e.get<double>() >= lo)) return "entries must be >= " + g(lo);
            return std::string();
        }
        return v.get<double>() >= lo ? std::string() : "must be >= " + g(lo);
    };
}

std::function<std::string(const json&)> positive() {
    return [](const json& v) {
        if (v.is_array()) {
            if (v.empty()) return std::string("must not be empty");
            for (const auto& e : v)
                if (!(e.get<double>() > 0.0)) return std::string("entries must be positive");
            return std::string();
        }
        return v.get<double>() > 0.0 ? std::string() : std::string("must be positive");
    };
}

std::function<std::string(const json&)> finite() {
    return [](const json& v) { return std::isfinite(v.get<double>()) ? "" : "must be finite"; };
}

std::function<std::string(const json&)> one_of(std::vector<std::string> choices) {
    return [=](const json& v) {
        for (const auto& c : choices)
            if (v.get<std::string>() == c) return std::string();
        std::string msg = "must be one of";
        for (const auto& c : choices) msg += " " + c;
        return msg;
    };
}

std::function<std::string(const json&)> between(std::uint64_t lo, std::uint64_t hi) {
    return [=](const json& v) {
        const auto x = v.get<std::uint64_t>();
        return x >= lo && x <= hi ? "" : "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
    };
}

std::function<std::string(const json&)> any() {
    return [](const json&) { return std::string(); };
}

json grid(double lo, double hi, int n) { return log_grid(lo, hi, n); }

const std::vector<Param>& schema(Kind k) {
    static const Param alpha{"alpha", Type::real, 0.5, open_interval(0.0, 1.0)};
    static const Param seed{"seed", Type::seed, 0, any()};
    static const std::vector<Param> sample{alpha, {"n", Type::count, 10, between(1, 100'000'000)}, seed};
    static const std::vector<Param> spectrum{alpha, {"n", Type::count, 1000, between(1, 1'000'000)}, seed,
                                             {"tol", Type::real, 0.0, at_least(0.0)}};
    static const std::vector<Param> aging{alpha,
                                          {"n", Type::count, 10000, between(2, 1'000'000)},
                                          seed,
                                          {"t_w", Type::real, 1000.0, positive()},
                                          {"thetas", Type::real_list, grid(0.1, 10.0, 9), positive()},
                                          {"replicas", Type::count, 10000, between(2, 100'000'000)}};
    static const std::vector<Param> mc{
        alpha,
        {"n", Type::count, 1000, between(2, 100'000'000)},
        seed,
        {"quantity", Type::text, "pi", one_of({"pi", "pi_indicator", "window1", "window2", "deep", "depth"})},
        {"t_w", Type::real, 1000.0, at_least(0.0)},
        {"theta", Type::real, 1.0, positive()},
        {"delta", Type::real, 0.1, positive()},
        {"replicas", Type::count, 1000, between(2, 100'000'000)}};
    static const std::vector<Param> ppp{{"regime", Type::count, 1, between(1, 3)},
                                        alpha,
                                        {"threshold", Type::real, -15.0, finite()},
                                        {"tau0s", Type::real_list, json::array({1.0}), positive()},
                                        {"thetas", Type::real_list, json::array({1.0}), positive()},
                                        {"t_ws", Type::real_list, grid(10.0, 1000.0, 3), at_least(0.0)},
                                        {"delta", Type::real, 0.1, positive()},
                                        seed,
                                        {"replicas", Type::count, 1000, between(1, 100'000'000)},
                                        {"method", Type::text, "spectral", one_of({"spectral", "contour", "laplace"})},
                                        {"tol", Type::real, 1e-8, positive()}};
    static const std::vector<Param> tauber{
        {"transform", Type::text, "pi_hat", one_of({"pi_hat", "deep_trap_unit", "deep_trap_half_line"})},
        alpha,
        {"theta", Type::real, 1.0, positive()},
        {"delta", Type::real, 0.5, positive()},
        {"s_values", Type::real_list, grid(10.0, 1000.0, 3), positive()},
        {"tol", Type::real, 1e-8, positive()},
        {"r_min", Type::real, 1e-4, open_interval(0.0, 1.0)},
        {"radii", Type::count, 17, between(3, 200)}};
    static const std::vector<Param> validate{{"run", Type::text, "", [](const json& v) {
                                                  return v.get<std::string>().empty() ? "must name a run directory" : "";
                                              }}};
    switch (k) {
    case Kind::sample: return sample;
    case Kind::spectrum: return spectrum;
    case Kind::aging: return aging;
    case Kind::mc: return mc;
    case Kind::ppp: return ppp;
    case Kind::tauber: return tauber;
    case Kind::validate: return validate;
    }
    return sample;
}

bool type_ok(Type t, const json& v) {
    switch (t) {
    case Type::real: return v.is_number();
    case Type::count:
    case Type::seed: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Type::text: return v.is_string();
    case Type::real_list:
        if (!v.is_array()) return false;
        for (const auto& e : v)
            if (!e.is_number()) return false;
        return true;
    }
    return false;
}

const char* type_name(Type t) {
    switch (t) {
    case Type::real: return "a number";
    case Type::count: return "a non-negative integer";
    case Type::seed: return "an unsigned 64-bit integer";
    case Type::text: return "a string";
    case Type::real_list: return "an array of numbers";
    }
    return "?";
}

json normalize(Type t, const json& v) {
    switch (t) {
    case Type::real: return v.get<double>();
    case Type::count:
    case Type::seed: return v.get<std::uint64_t>();
    case Type::real_list: return v.get<std::vector<double>>();
    case Type::text: return v;
    }
    return v;
}

json resolve_params(Kind k, const json& given) {
    if (!given.is_object()) throw ValidationError("params must be an object");
    const auto& params = schema(k);
    for (const auto& [key, _] : given.items()) {
        bool known = false;
        for (const auto& p : params) known = known || p.name == key;
        if (!known) throw ValidationError("unknown parameter '" + key + "' for kind " + to_string(k));
    }
    json out = json::object();
    for (const auto& p : params) {
        const json& v = given.contains(p.name) ? given.at(p.name) : p.fallback;
        if (!type_ok(p.type, v)) throw ValidationError("parameter " + p.name + " must be " + type_name(p.type));
        const json norm = normalize(p.type, v);
        if (const std::string err = p.check(norm); !err.empty())
            throw ValidationError("parameter " + p.name + " " + err);
        out[p.name] = norm;
    }
    return out;
}

}  // namespace

Manifest parse_manifest(const json& j) {
    if (!j.is_object()) throw ValidationError("manifest must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "version" && key != "kind" && key != "params" && key != "output")
            throw ValidationError("unknown manifest field '" + key + "'");
    if (!j.contains("version")) throw ValidationError("manifest has no version field");
    if (!j.at("version").is_number_integer() || j.at("version").get<int>() != kManifestVersion)
        throw ValidationError("unsupported manifest version (expected " + std::to_string(kManifestVersion) + ")");
    if (!j.contains("kind") || !j.at("kind").is_string()) throw ValidationError("manifest kind must be a string");
    Manifest m;
    m.kind = kind_from_string(j.at("kind").get<std::string>());
    m.params = resolve_params(m.kind, j.value("params", json::object()));
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ValidationError("output must be a string");
        m.output = j.at("output").get<std::string>();
    }
    return m;
}

Manifest parse_manifest_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    return parse_manifest(j);
}

Manifest default_manifest(Kind k) {
    Manifest m;
    m.kind = k;
    m.params = resolve_params(k, json::object());
    return m;
}

Manifest apply_overrides(Manifest m, const Overrides& o) {
    json given = m.params;
    if (o.seed) {
        if (!given.contains("seed")) throw ValidationError("--seed does not apply to kind " + to_string(m.kind));
        given["seed"] = *o.seed;
    }
    if (o.tol) {
        if (!given.contains("tol")) throw ValidationError("--tol does not apply to kind " + to_string(m.kind));
        given["tol"] = *o.tol;
    }
    m.params = resolve_params(m.kind, given);
    if (o.out) m.output = *o.out;
    return m;
}

json resolved_json(const Manifest& m) {
    json j;
    j["version"] = kManifestVersion;
    j["kind"] = to_string(m.kind);
    j["params"] = m.params;
    return j;
}

}  // namespace trap::cli
