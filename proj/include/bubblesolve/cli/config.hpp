#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"  // vendored nlohmann, used for parsing only

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/models/kocherlakota.hpp"
#include "bubblesolve/models/leverage.hpp"
#include "bubblesolve/models/production.hpp"
#include "bubblesolve/models/samuelson.hpp"
#include "bubblesolve/models/storage_risk.hpp"
#include "bubblesolve/models/tirole.hpp"
#include "bubblesolve/models/utility.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::cli {

enum class RunKind { Steady, Determinacy, Path, Sweep, Verify };

constexpr const char* to_string(RunKind r) noexcept {
    switch (r) {
        case RunKind::Steady: return "steady";
        case RunKind::Determinacy: return "determinacy";
        case RunKind::Path: return "path";
        case RunKind::Sweep: return "sweep";
        case RunKind::Verify: return "verify";
    }
    return "unknown";
}

struct Tolerances {
    double solver = 1e-12;
    double verify = 1e-8;
    double bubbly = 1e-10;
};

struct SweepSpec {
    std::string parameter;
    std::vector<double> grid;
};

// Parametric reduced-form pieces for the custom model (functions cannot live
// in a config file; affine and constant shapes cover the desk-scale cases).
struct CustomReducedForm {
    double growth_slope = 0.0;
    double growth_intercept = 0.0;
    double saving_slope = 0.0;
    double saving_intercept = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

struct ProductionConfig {
    std::string type;  // "cobb_douglas" or "ces"
    double A = 1.0;
    double alpha = 0.0;       // cobb_douglas
    double theta = 0.0;       // ces share
    double elasticity = 0.0;  // ces substitution elasticity
    double delta = 0.0;       // embedded depreciation (tirole only)
};

struct UtilityConfig {
    std::string type;  // "log" or "crra"
    double beta = 0.0;
    double sigma = 0.0;  // crra curvature
};

struct ScenarioConfig {
    std::string model;
    RunKind run = RunKind::Steady;
    bool run_specified = false;
    int horizon = 100;
    Tolerances tolerances;
    std::optional<SweepSpec> sweep;

    // model parameter blocks (exactly one is populated)
    std::optional<models::samuelson::Params> samuelson;
    std::optional<models::tirole::Params> tirole;
    std::optional<models::kocherlakota::Params> kocherlakota;
    std::optional<models::leverage::Params> leverage;
    std::optional<models::storage_risk::Params> storage;
    std::optional<CustomReducedForm> custom;

    // raw blocks kept for the scenario echo and for sweep re-parameterization
    ProductionConfig production_cfg;
    UtilityConfig utility_cfg;

    // initial conditions for path/verify runs
    std::optional<double> initial_P0;  // samuelson closed form (D0 = 0)
    std::optional<double> initial_y0;  // leverage
    std::optional<double> initial_k0;  // tirole
};

namespace detail {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& msg) {
    throw ToolkitError(ErrorCode::ConfigInvalid, msg);
}

inline void reject_unknown(const json& obj, const std::vector<std::string>& allowed,
                           const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const auto& k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) bad("unknown key '" + it.key() + "' in " + where);
    }
}

inline double need_num(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.contains(key)) bad("missing key '" + key + "' in " + where);
    if (!obj[key].is_number()) bad("key '" + key + "' in " + where + " must be a number");
    return obj[key].get<double>();
}

inline double opt_num(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) bad("key '" + key + "' must be a number");
    return obj[key].get<double>();
}

inline ProductionConfig parse_production(const json& j, const std::string& where,
                                         bool allow_delta) {
    if (!j.is_object()) bad(where + " must be an object");
    ProductionConfig pc;
    if (!j.contains("type") || !j["type"].is_string()) bad(where + " needs a string 'type'");
    pc.type = j["type"].get<std::string>();
    if (pc.type == "cobb_douglas") {
        reject_unknown(j, allow_delta ? std::vector<std::string>{"type", "A", "alpha", "delta"}
                                      : std::vector<std::string>{"type", "A", "alpha"},
                       where);
        pc.A = need_num(j, "A", where);
        pc.alpha = need_num(j, "alpha", where);
        if (allow_delta) pc.delta = opt_num(j, "delta", 0.0);
    } else if (pc.type == "ces") {
        reject_unknown(j,
                       allow_delta
                           ? std::vector<std::string>{"type", "A", "theta", "elasticity", "delta"}
                           : std::vector<std::string>{"type", "A", "theta", "elasticity"},
                       where);
        pc.A = need_num(j, "A", where);
        pc.theta = need_num(j, "theta", where);
        pc.elasticity = need_num(j, "elasticity", where);
        if (allow_delta) pc.delta = opt_num(j, "delta", 0.0);
    } else {
        bad(where + ": unknown production type '" + pc.type + "'");
    }
    return pc;
}

inline models::ProductionSpec build_production(const ProductionConfig& pc, bool embed_delta) {
    models::ProductionSpec base = pc.type == "cobb_douglas"
                                      ? models::cobb_douglas(pc.A, pc.alpha)
                                      : models::ces(pc.A, pc.theta, pc.elasticity);
    if (embed_delta) return models::with_undepreciated_capital(base, pc.delta);
    return base;
}

inline UtilityConfig parse_utility(const json& j, const std::string& where) {
    if (!j.is_object()) bad(where + " must be an object");
    UtilityConfig uc;
    if (!j.contains("type") || !j["type"].is_string()) bad(where + " needs a string 'type'");
    uc.type = j["type"].get<std::string>();
    if (uc.type == "log") {
        reject_unknown(j, {"type", "beta"}, where);
        uc.beta = need_num(j, "beta", where);
    } else if (uc.type == "crra") {
        reject_unknown(j, {"type", "beta", "sigma"}, where);
        uc.beta = need_num(j, "beta", where);
        uc.sigma = need_num(j, "sigma", where);
    } else {
        bad(where + ": unknown utility type '" + uc.type + "'");
    }
    return uc;
}

inline models::UtilitySpec build_utility(const UtilityConfig& uc) {
    return uc.type == "log" ? models::log_utility(uc.beta) : models::crra(uc.beta, uc.sigma);
}

}  // namespace detail

inline ScenarioConfig parse_config(const std::string& text) {
    using detail::bad;
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) bad("config root must be an object");
    detail::reject_unknown(
        j, {"model", "run", "params", "horizon", "tolerances", "sweep", "initial"}, "config");

    ScenarioConfig cfg;
    if (!j.contains("model") || !j["model"].is_string()) bad("config needs a string 'model'");
    cfg.model = j["model"].get<std::string>();

    if (j.contains("run")) {
        if (!j["run"].is_string()) bad("'run' must be a string");
        std::string r = j["run"].get<std::string>();
        cfg.run_specified = true;
        if (r == "steady")
            cfg.run = RunKind::Steady;
        else if (r == "determinacy")
            cfg.run = RunKind::Determinacy;
        else if (r == "path")
            cfg.run = RunKind::Path;
        else if (r == "sweep")
            cfg.run = RunKind::Sweep;
        else if (r == "verify")
            cfg.run = RunKind::Verify;
        else
            bad("unknown run kind '" + r + "'");
    }

    if (j.contains("horizon")) {
        if (!j["horizon"].is_number_integer() || j["horizon"].get<long long>() < 1)
            bad("'horizon' must be a positive integer");
        cfg.horizon = static_cast<int>(j["horizon"].get<long long>());
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) bad("'tolerances' must be an object");
        detail::reject_unknown(t, {"solver", "verify", "bubbly"}, "tolerances");
        cfg.tolerances.solver = detail::opt_num(t, "solver", cfg.tolerances.solver);
        cfg.tolerances.verify = detail::opt_num(t, "verify", cfg.tolerances.verify);
        cfg.tolerances.bubbly = detail::opt_num(t, "bubbly", cfg.tolerances.bubbly);
        if (cfg.tolerances.solver <= 0.0 || cfg.tolerances.verify <= 0.0 ||
            cfg.tolerances.bubbly <= 0.0)
            bad("tolerances must be positive");
    }

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (!s.is_object()) bad("'sweep' must be an object");
        detail::reject_unknown(s, {"parameter", "from", "to", "step", "values"}, "sweep");
        SweepSpec spec;
        if (!s.contains("parameter") || !s["parameter"].is_string())
            bad("sweep needs a string 'parameter'");
        spec.parameter = s["parameter"].get<std::string>();
        if (s.contains("values")) {
            if (!s["values"].is_array()) bad("sweep 'values' must be an array");
            for (const auto& v : s["values"]) {
                if (!v.is_number()) bad("sweep values must be numbers");
                spec.grid.push_back(v.get<double>());
            }
        } else {
            double from = detail::need_num(s, "from", "sweep");
            double to = detail::need_num(s, "to", "sweep");
            double step = detail::need_num(s, "step", "sweep");
            if (!(step > 0.0)) bad("sweep step must be positive");
            for (int i = 0;; ++i) {
                double v = from + i * step;
                if (v > to + 0.5 * step) break;
                spec.grid.push_back(v);
            }
        }
        if (spec.grid.empty()) bad("sweep grid is empty");
        cfg.sweep = spec;
    }

    if (!j.contains("params") || !j["params"].is_object()) bad("config needs an object 'params'");
    const json& p = j["params"];

    const json initial = j.contains("initial") ? j["initial"] : json::object();
    if (!initial.is_object()) bad("'initial' must be an object");

    if (cfg.model == "samuelson") {
        detail::reject_unknown(p, {"a", "b", "beta", "G", "G_d", "D0"}, "samuelson params");
        models::samuelson::Params m;
        m.a = detail::need_num(p, "a", "samuelson params");
        m.b = detail::need_num(p, "b", "samuelson params");
        m.beta = detail::need_num(p, "beta", "samuelson params");
        m.G = detail::need_num(p, "G", "samuelson params");
        m.G_d = detail::opt_num(p, "G_d", 1.0);
        m.D0 = detail::opt_num(p, "D0", 0.0);
        m.validate();
        cfg.samuelson = m;
        detail::reject_unknown(initial, {"P0"}, "initial");
        if (initial.contains("P0")) cfg.initial_P0 = detail::need_num(initial, "P0", "initial");
    } else if (cfg.model == "tirole") {
        detail::reject_unknown(p, {"production", "utility", "G", "G_d", "D0", "N0"},
                               "tirole params");
        if (!p.contains("production")) detail::bad("tirole params need 'production'");
        if (!p.contains("utility")) detail::bad("tirole params need 'utility'");
        cfg.production_cfg = detail::parse_production(p["production"], "tirole production", true);
        cfg.utility_cfg = detail::parse_utility(p["utility"], "tirole utility");
        models::tirole::Params m;
        m.production = detail::build_production(cfg.production_cfg, true);
        m.utility = detail::build_utility(cfg.utility_cfg);
        m.G = detail::need_num(p, "G", "tirole params");
        m.G_d = detail::opt_num(p, "G_d", 1.0);
        m.D0 = detail::opt_num(p, "D0", 0.0);
        m.N0 = detail::opt_num(p, "N0", 1.0);
        m.validate();
        cfg.tirole = m;
        detail::reject_unknown(initial, {"k0"}, "initial");
        if (initial.contains("k0")) cfg.initial_k0 = detail::need_num(initial, "k0", "initial");
    } else if (cfg.model == "kocherlakota") {
        detail::reject_unknown(p, {"a", "b", "beta", "gamma", "G"}, "kocherlakota params");
        models::kocherlakota::Params m;
        m.a = detail::need_num(p, "a", "kocherlakota params");
        m.b = detail::need_num(p, "b", "kocherlakota params");
        m.beta = detail::need_num(p, "beta", "kocherlakota params");
        m.gamma = detail::need_num(p, "gamma", "kocherlakota params");
        m.G = detail::need_num(p, "G", "kocherlakota params");
        m.validate();
        cfg.kocherlakota = m;
        detail::reject_unknown(initial, {}, "initial");
    } else if (cfg.model == "leverage") {
        detail::reject_unknown(p, {"beta", "pi", "lambda", "delta", "G", "D", "production"},
                               "leverage params");
        if (!p.contains("production")) detail::bad("leverage params need 'production'");
        cfg.production_cfg = detail::parse_production(p["production"], "leverage production", false);
        models::leverage::Params m;
        m.production = detail::build_production(cfg.production_cfg, false);
        m.beta = detail::need_num(p, "beta", "leverage params");
        m.pi = detail::need_num(p, "pi", "leverage params");
        m.lambda = detail::need_num(p, "lambda", "leverage params");
        m.delta = detail::need_num(p, "delta", "leverage params");
        m.G = detail::need_num(p, "G", "leverage params");
        m.D = detail::opt_num(p, "D", 0.0);
        m.validate();
        cfg.leverage = m;
        detail::reject_unknown(initial, {"y0"}, "initial");
        if (initial.contains("y0")) cfg.initial_y0 = detail::need_num(initial, "y0", "initial");
    } else if (cfg.model == "storage_risk") {
        detail::reject_unknown(p, {"beta", "z_dist"}, "storage_risk params");
        models::storage_risk::Params m;
        m.beta = detail::need_num(p, "beta", "storage_risk params");
        if (!p.contains("z_dist") || !p["z_dist"].is_array())
            detail::bad("storage_risk params need an array 'z_dist'");
        for (const auto& zp : p["z_dist"]) {
            if (!zp.is_object()) detail::bad("z_dist entries must be objects");
            detail::reject_unknown(zp, {"value", "prob"}, "z_dist entry");
            m.z_dist.emplace_back(detail::need_num(zp, "value", "z_dist entry"),
                                  detail::need_num(zp, "prob", "z_dist entry"));
        }
        m.validate();
        cfg.storage = m;
        detail::reject_unknown(initial, {}, "initial");
    } else if (cfg.model == "reduced_form_custom") {
        detail::reject_unknown(p,
                               {"growth_slope", "growth_intercept", "saving_slope",
                                "saving_intercept", "bracket_lo", "bracket_hi"},
                               "reduced_form_custom params");
        CustomReducedForm m;
        m.growth_slope = detail::opt_num(p, "growth_slope", 0.0);
        m.growth_intercept = detail::need_num(p, "growth_intercept", "reduced_form_custom params");
        m.saving_slope = detail::need_num(p, "saving_slope", "reduced_form_custom params");
        m.saving_intercept = detail::need_num(p, "saving_intercept", "reduced_form_custom params");
        m.bracket_lo = detail::need_num(p, "bracket_lo", "reduced_form_custom params");
        m.bracket_hi = detail::need_num(p, "bracket_hi", "reduced_form_custom params");
        cfg.custom = m;
        detail::reject_unknown(initial, {}, "initial");
    } else {
        throw ToolkitError(ErrorCode::UnknownModel, "unknown model '" + cfg.model + "'");
    }

    return cfg;
}

// Applies a sweep parameter override; throws ConfigInvalid for unsupported names.
inline void apply_sweep_value(ScenarioConfig& cfg, const std::string& name, double value) {
    using detail::bad;
    auto rebuild_tirole = [&]() {
        models::tirole::Params& m = *cfg.tirole;
        m.production = detail::build_production(cfg.production_cfg, true);
        m.utility = detail::build_utility(cfg.utility_cfg);
    };
    if (cfg.samuelson) {
        auto& m = *cfg.samuelson;
        if (name == "a") m.a = value;
        else if (name == "b") m.b = value;
        else if (name == "beta") m.beta = value;
        else if (name == "G") m.G = value;
        else if (name == "G_d") m.G_d = value;
        else if (name == "D0") m.D0 = value;
        else bad("samuelson cannot sweep parameter '" + name + "'");
        m.validate();
    } else if (cfg.tirole) {
        auto& m = *cfg.tirole;
        if (name == "G") m.G = value;
        else if (name == "G_d") m.G_d = value;
        else if (name == "D0") m.D0 = value;
        else if (name == "eis") {
            if (!(value > 0.0)) bad("eis must be positive");
            cfg.utility_cfg.type = "crra";
            if (cfg.utility_cfg.beta <= 0.0) bad("utility beta must be set before sweeping eis");
            cfg.utility_cfg.sigma = 1.0 / value;
            rebuild_tirole();
        } else if (name == "sigma") {
            cfg.utility_cfg.type = "crra";
            cfg.utility_cfg.sigma = value;
            rebuild_tirole();
        } else if (name == "A") {
            cfg.production_cfg.A = value;
            rebuild_tirole();
        } else if (name == "alpha") {
            cfg.production_cfg.alpha = value;
            rebuild_tirole();
        } else if (name == "delta") {
            cfg.production_cfg.delta = value;
            rebuild_tirole();
        } else {
            bad("tirole cannot sweep parameter '" + name + "'");
        }
        m.validate();
    } else if (cfg.kocherlakota) {
        auto& m = *cfg.kocherlakota;
        if (name == "a") m.a = value;
        else if (name == "b") m.b = value;
        else if (name == "beta") m.beta = value;
        else if (name == "gamma") m.gamma = value;
        else if (name == "G") m.G = value;
        else bad("kocherlakota cannot sweep parameter '" + name + "'");
        m.validate();
    } else if (cfg.leverage) {
        auto& m = *cfg.leverage;
        if (name == "beta") m.beta = value;
        else if (name == "pi") m.pi = value;
        else if (name == "lambda") m.lambda = value;
        else if (name == "delta") m.delta = value;
        else if (name == "G") m.G = value;
        else if (name == "D") m.D = value;
        else if (name == "elasticity") {
            cfg.production_cfg.elasticity = value;
            if (cfg.production_cfg.type != "ces") bad("sweeping elasticity requires CES production");
            m.production = detail::build_production(cfg.production_cfg, false);
        } else {
            bad("leverage cannot sweep parameter '" + name + "'");
        }
        m.validate();
    } else if (cfg.storage) {
        auto& m = *cfg.storage;
        if (name == "beta") m.beta = value;
        else bad("storage_risk cannot sweep parameter '" + name + "'");
        m.validate();
    } else {
        bad("model does not support sweeps");
    }
}

}  // namespace bubblesolve::cli
