#include "dupire/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dupire {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
}

double number(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing \"" + key + "\"");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
    return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::vector<double> numbers(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

ModelSpec model_from_json(const json& j) {
    only_keys(j, {"model", "params"}, "model spec");
    if (!j.contains("model") || !j.at("model").is_string()) {
        throw ConfigError("model spec: \"model\" must be a string");
    }
    const std::string name = j.at("model").get<std::string>();
    const json params = j.value("params", json::object());
    const std::string where = name + " params";
    try {
        if (name == "heston") {
            only_keys(params, {"a", "b", "c", "rho", "v0", "s0"}, where);
            return ModelSpec(HestonParams{number(params, "a", where), number(params, "b", where),
                                          number(params, "c", where), number(params, "rho", where),
                                          number_or(params, "s0", 1.0, where),
                                          number(params, "v0", where)});
        }
        if (name == "bs") {
            only_keys(params, {"variance", "start_times", "variances"}, where);
            BsTimeDepParams p;
            if (params.contains("variance")) {
                if (params.contains("variances")) {
                    throw ConfigError(where + ": give either \"variance\" or \"variances\"");
                }
                p.start_times = {0.0};
                p.variances = {number(params, "variance", where)};
            } else {
                if (!params.contains("variances")) throw ConfigError(where + ": missing \"variances\"");
                p.variances = numbers(params.at("variances"), where + ".variances");
                p.start_times = params.contains("start_times")
                                    ? numbers(params.at("start_times"), where + ".start_times")
                                    : std::vector<double>{0.0};
            }
            return ModelSpec(p);
        }
        if (name == "kou") {
            only_keys(params, {"sigma", "lambda", "p", "lambda_plus", "lambda_minus"}, where);
            return ModelSpec(KouParams{number(params, "sigma", where), number(params, "lambda", where),
                                       number(params, "p", where), number(params, "lambda_plus", where),
                                       number(params, "lambda_minus", where)});
        }
        if (name == "vargamma") {
            only_keys(params, {"sigma", "theta", "nu"}, where);
            return ModelSpec(VarianceGammaParams{number(params, "sigma", where),
                                                 number(params, "theta", where),
                                                 number(params, "nu", where)});
        }
        if (name == "nig") {
            only_keys(params, {"alpha", "beta", "delta"}, where);
            return ModelSpec(NigParams{number(params, "alpha", where), number(params, "beta", where),
                                       number(params, "delta", where)});
        }
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown model \"" + name + "\" (heston, bs, kou, vargamma, nig)");
}

json parse_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
}

VolMethod method_from_name(const std::string& name) {
    if (name == "exact") return VolMethod::Exact;
    if (name == "saddle") return VolMethod::Saddle;
    if (name == "asymptote") return VolMethod::Asymptote;
    throw ConfigError("unknown method \"" + name + "\" (exact, saddle, asymptote)");
}

void set_methods(RunConfig& cfg, std::vector<VolMethod> methods) {
    std::vector<VolMethod> unique;
    for (const VolMethod m : {VolMethod::Exact, VolMethod::Saddle, VolMethod::Asymptote}) {
        if (std::find(methods.begin(), methods.end(), m) != methods.end()) unique.push_back(m);
    }
    cfg.methods = unique;
}

}  // namespace

std::vector<double> KGrid::points() const {
    std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        out[i] = count == 1 ? min : min + (max - min) * i / (count - 1);
    }
    if (count > 1) out.back() = max;
    return out;
}

ModelSpec parse_model(const std::string& json_text) {
    return model_from_json(parse_text(json_text));
}

std::vector<VolMethod> parse_methods(const std::string& list) {
    std::vector<VolMethod> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(method_from_name(item));
    }
    if (out.empty()) throw ConfigError("methods must be nonempty");
    return out;
}

RunConfig parse_run_config(const std::string& json_text) {
    const json j = parse_text(json_text);
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    if (j.contains("model") && j.at("model").is_string()) {
        return RunConfig(model_from_json(j));
    }
    only_keys(j, {"model", "k_grid", "T", "T_grid", "methods", "quadrature", "output"}, "config");
    if (!j.contains("model")) throw ConfigError("config: missing \"model\"");
    RunConfig cfg(model_from_json(j.at("model")));

    if (j.contains("k_grid")) {
        const json& g = j.at("k_grid");
        only_keys(g, {"min", "max", "count"}, "k_grid");
        cfg.k_grid.min = number(g, "min", "k_grid");
        cfg.k_grid.max = number(g, "max", "k_grid");
        const double count = number(g, "count", "k_grid");
        if (count != std::floor(count)) throw ConfigError("k_grid: count must be an integer");
        cfg.k_grid.count = static_cast<int>(count);
    }
    if (j.contains("T") && j.contains("T_grid")) throw ConfigError("config: give either T or T_grid");
    if (j.contains("T")) cfg.T_grid = {number(j, "T", "config")};
    if (j.contains("T_grid")) cfg.T_grid = numbers(j.at("T_grid"), "T_grid");
    if (cfg.T_grid.empty()) throw ConfigError("T_grid must be nonempty");
    for (const double T : cfg.T_grid) {
        if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("maturities must be > 0");
    }
    if (j.contains("methods")) {
        const json& m = j.at("methods");
        if (!m.is_array() || m.empty()) throw ConfigError("methods: expected a nonempty array");
        std::vector<VolMethod> methods;
        for (const json& x : m) {
            if (!x.is_string()) throw ConfigError("methods: expected strings");
            methods.push_back(method_from_name(x.get<std::string>()));
        }
        set_methods(cfg, methods);
    }
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        only_keys(q, {"contour_re", "truncation", "rel_tol", "abs_tol", "max_evals", "check_symmetry"},
                  "quadrature");
        QuadratureConfig& qc = cfg.quadrature;
        if (q.contains("contour_re")) qc.contour_re = number(q, "contour_re", "quadrature");
        qc.truncation = number_or(q, "truncation", qc.truncation, "quadrature");
        qc.rel_tol = number_or(q, "rel_tol", qc.rel_tol, "quadrature");
        qc.abs_tol = number_or(q, "abs_tol", qc.abs_tol, "quadrature");
        const double evals = number_or(q, "max_evals", static_cast<double>(qc.max_evals), "quadrature");
        if (!(evals >= 1.0)) throw ConfigError("quadrature: max_evals must be >= 1");
        qc.max_evals = static_cast<std::size_t>(evals);
        if (q.contains("check_symmetry")) {
            if (!q.at("check_symmetry").is_boolean()) {
                throw ConfigError("quadrature: check_symmetry must be a boolean");
            }
            qc.check_symmetry = q.at("check_symmetry").get<bool>();
        }
        if (!(qc.rel_tol > 0.0) || !(qc.abs_tol > 0.0) || qc.truncation < 0.0) {
            throw ConfigError("quadrature: tolerances must be > 0 and truncation >= 0");
        }
    }
    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("output must be a string");
        cfg.output = j.at("output").get<std::string>();
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

void validate_for_curve(const RunConfig& cfg) {
    if (cfg.k_grid.count < 2) throw ConfigError("k_grid.count must be >= 2");
    if (!std::isfinite(cfg.k_grid.min) || !std::isfinite(cfg.k_grid.max) ||
        !(cfg.k_grid.max > cfg.k_grid.min)) {
        throw ConfigError("k_grid: need finite min < max");
    }
    if (cfg.methods.empty()) throw ConfigError("methods must be nonempty");
    const bool saddle = std::find(cfg.methods.begin(), cfg.methods.end(), VolMethod::Saddle) !=
                        cfg.methods.end();
    if (saddle && cfg.model.family() == Family::Nig) {
        throw ConfigError("saddle method is not valid for NIG (no blow-up at s_+)");
    }
}

RunConfig figure_preset(const std::string& name) {
    std::optional<ModelSpec> model;
    if (name == "heston") {
        model.emplace(HestonParams{0.0428937, -0.6067, 0.2928, -0.7571, 1.0, 0.0654});
    } else if (name == "kou") {
        model.emplace(KouParams{0.2, 10.0, 0.3, 50.0, 25.0});
    } else if (name == "vargamma") {
        model.emplace(VarianceGammaParams{0.261652, -0.218033, 0.0552584});
    } else {
        throw ConfigError("unknown figure \"" + name + "\" (heston, kou, vargamma)");
    }
    RunConfig cfg(*model);
    cfg.k_grid = {0.3, 3.0, 50};
    cfg.T_grid = {1.0};
    return cfg;
}

}  // namespace dupire
