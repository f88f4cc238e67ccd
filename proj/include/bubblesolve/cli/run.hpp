#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bubblesolve/cli/config.hpp"
#include "bubblesolve/diag/necessity.hpp"
#include "bubblesolve/diag/verify.hpp"
#include "bubblesolve/dynsys/path.hpp"
#include "bubblesolve/dynsys/steady.hpp"
#include "bubblesolve/report/json.hpp"

namespace bubblesolve::cli {

using report::Json;

namespace detail {

inline Json spectrum_json(const Spectrum& eigs) {
    Json arr = Json::array();
    for (const Complex& e : eigs) {
        Json c = Json::object();
        c.set("re", Json(e.real()));
        c.set("im", Json(e.imag()));
        c.set("abs", Json(std::abs(e)));
        arr.push(std::move(c));
    }
    return arr;
}

inline Json verdict_json(const dynsys::DeterminacyVerdict& v) {
    Json j = Json::object();
    j.set("stable_count", Json(v.stable_count));
    j.set("unstable_count", Json(v.unstable_count));
    j.set("on_circle_count", Json(v.on_circle_count));
    j.set("predetermined_count", Json(v.predetermined_count));
    j.set("margin", Json(v.margin));
    j.set("classification", Json(dynsys::to_string(v.classification)));
    return j;
}

inline Json steady_json(const dynsys::SteadyState& ss) {
    Json j = Json::object();
    j.set("point", report::from_vec(ss.point));
    j.set("residual_norm", Json(ss.residual_norm));
    Json jac = Json::array();
    for (int i = 0; i < ss.jacobian.n; ++i) {
        Json row = Json::array();
        for (int k = 0; k < ss.jacobian.m; ++k) row.push(Json(ss.jacobian(i, k)));
        jac.push(std::move(row));
    }
    j.set("jacobian", std::move(jac));
    j.set("eigenvalues", spectrum_json(ss.eigenvalues));
    j.set("verdict", verdict_json(ss.verdict));
    return j;
}

inline Json necessity_json(const reduced::NecessityVerdict& n) {
    Json j = Json::object();
    j.set("R_limit", Json(n.R_limit));
    j.set("G_d", Json(n.G_d));
    j.set("G", Json(n.G));
    j.set("status", Json(reduced::to_string(n.status)));
    j.set("eliminated", Json(n.eliminated()));
    return j;
}

inline Json certificate_json(const diag::NecessityCertificate& c) {
    Json j = Json::object();
    j.set("R_limit", Json(c.R_limit));
    j.set("G_d", Json(c.G_d));
    j.set("G", Json(c.G));
    j.set("D0", Json(c.D0));
    Json horizons = Json::array();
    Json sums = Json::array();
    Json logs = Json::array();
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
        horizons.push(Json(c.horizons[i]));
        sums.push(Json(c.partial_sums[i]));
        logs.push(Json(c.log10_sums[i]));
    }
    j.set("horizons", std::move(horizons));
    j.set("partial_sums", std::move(sums));
    j.set("log10_partial_sums", std::move(logs));
    j.set("eliminated", Json(c.eliminated));
    j.set("growth_factor_ok", Json(c.growth_factor_ok));
    return j;
}

inline Json residuals_json(const diag::ResidualReport& r) {
    Json j = Json::object();
    Json conds = Json::array();
    for (const auto& c : r.conditions) {
        Json cj = Json::object();
        cj.set("name", Json(c.name));
        cj.set("max", Json(c.max));
        cj.set("skipped", Json(c.skipped));
        conds.push(std::move(cj));
    }
    j.set("conditions", std::move(conds));
    j.set("overall_max", Json(r.overall_max));
    j.set("tolerance", Json(r.tolerance));
    j.set("pass", Json(r.pass));
    return j;
}

inline Json production_json(const ProductionConfig& pc, bool with_delta) {
    Json j = Json::object();
    j.set("type", Json(pc.type));
    j.set("A", Json(pc.A));
    if (pc.type == "cobb_douglas") j.set("alpha", Json(pc.alpha));
    if (pc.type == "ces") {
        j.set("theta", Json(pc.theta));
        j.set("elasticity", Json(pc.elasticity));
    }
    if (with_delta) j.set("delta", Json(pc.delta));
    return j;
}

inline Json params_echo(const ScenarioConfig& cfg) {
    Json j = Json::object();
    if (cfg.samuelson) {
        const auto& m = *cfg.samuelson;
        j.set("a", Json(m.a)).set("b", Json(m.b)).set("beta", Json(m.beta)).set("G", Json(m.G));
        j.set("G_d", Json(m.G_d)).set("D0", Json(m.D0));
    } else if (cfg.tirole) {
        const auto& m = *cfg.tirole;
        j.set("production", production_json(cfg.production_cfg, true));
        Json u = Json::object();
        u.set("type", Json(cfg.utility_cfg.type));
        u.set("beta", Json(cfg.utility_cfg.beta));
        if (cfg.utility_cfg.type == "crra") u.set("sigma", Json(cfg.utility_cfg.sigma));
        j.set("utility", std::move(u));
        j.set("G", Json(m.G)).set("G_d", Json(m.G_d)).set("D0", Json(m.D0)).set("N0", Json(m.N0));
    } else if (cfg.kocherlakota) {
        const auto& m = *cfg.kocherlakota;
        j.set("a", Json(m.a)).set("b", Json(m.b)).set("beta", Json(m.beta));
        j.set("gamma", Json(m.gamma)).set("G", Json(m.G));
    } else if (cfg.leverage) {
        const auto& m = *cfg.leverage;
        j.set("beta", Json(m.beta)).set("pi", Json(m.pi)).set("lambda", Json(m.lambda));
        j.set("delta", Json(m.delta)).set("G", Json(m.G)).set("D", Json(m.D));
        j.set("production", production_json(cfg.production_cfg, false));
    } else if (cfg.storage) {
        const auto& m = *cfg.storage;
        j.set("beta", Json(m.beta));
        Json z = Json::array();
        for (auto [v, p] : m.z_dist) {
            Json e = Json::object();
            e.set("value", Json(v));
            e.set("prob", Json(p));
            z.push(std::move(e));
        }
        j.set("z_dist", std::move(z));
    } else if (cfg.custom) {
        const auto& m = *cfg.custom;
        j.set("growth_slope", Json(m.growth_slope));
        j.set("growth_intercept", Json(m.growth_intercept));
        j.set("saving_slope", Json(m.saving_slope));
        j.set("saving_intercept", Json(m.saving_intercept));
        j.set("bracket_lo", Json(m.bracket_lo));
        j.set("bracket_hi", Json(m.bracket_hi));
    }
    return j;
}

inline Json scenario_echo(const ScenarioConfig& cfg) {
    Json j = Json::object();
    j.set("model", Json(cfg.model));
    j.set("run", Json(to_string(cfg.run)));
    j.set("params", params_echo(cfg));
    j.set("horizon", Json(cfg.horizon));
    Json tol = Json::object();
    tol.set("solver", Json(cfg.tolerances.solver));
    tol.set("verify", Json(cfg.tolerances.verify));
    tol.set("bubbly", Json(cfg.tolerances.bubbly));
    j.set("tolerances", std::move(tol));
    if (cfg.sweep) {
        Json s = Json::object();
        s.set("parameter", Json(cfg.sweep->parameter));
        s.set("grid", report::from_vec(cfg.sweep->grid));
        j.set("sweep", std::move(s));
    }
    if (cfg.initial_P0) j.set("initial_P0", Json(*cfg.initial_P0));
    if (cfg.initial_y0) j.set("initial_y0", Json(*cfg.initial_y0));
    if (cfg.initial_k0) j.set("initial_k0", Json(*cfg.initial_k0));
    return j;
}

[[noreturn]] inline void unsupported(const ScenarioConfig& cfg, const std::string& why) {
    throw ToolkitError(ErrorCode::ConfigInvalid,
                       "model '" + cfg.model + "' does not support run '" +
                           std::string(to_string(cfg.run)) + "': " + why);
}

inline reduced::ReducedFormEconomy custom_economy(const CustomReducedForm& m) {
    reduced::ReducedFormEconomy econ;
    econ.name = "reduced_form_custom";
    econ.growth = [m](double R) { return m.growth_slope * R + m.growth_intercept; };
    econ.saving = [m](double R) { return reduced::Interval(m.saving_slope * R + m.saving_intercept); };
    econ.growth_jump_bound = 1.0;
    return econ;
}

}  // namespace detail

struct RunOutput {
    Json report = Json::object();
    std::string csv;          // populated for sweep and path runs
    bool verification_pass = true;
    int row_errors = 0;

    [[nodiscard]] int exit_code() const {
        if (row_errors > 0) return 3;
        if (!verification_pass) return 4;
        return 0;
    }
};

namespace detail {

// ---------------------------------------------------------------------------
// Samuelson runs
// ---------------------------------------------------------------------------

inline Json samuelson_steady_results(const ScenarioConfig& cfg) {
    const auto& m = *cfg.samuelson;
    if (!(m.D0 > 0.0))
        throw ToolkitError(ErrorCode::ConfigInvalid,
                           "steady/determinacy analyze the dividend-injected system; set D0 > 0");
    namespace sam = models::samuelson;
    sam::Injected inj = sam::make_injected(m);
    double coeff = sam::bubbly_price_coeff(m);

    dynsys::SteadyState fundamental =
        dynsys::find_fixed_point(inj.system, {std::min(1e-4, 0.1 * std::abs(coeff)), 0.0},
                                 cfg.tolerances.solver, 200);
    dynsys::SteadyState bubbly =
        dynsys::find_fixed_point(inj.system, {coeff, 0.0}, cfg.tolerances.solver, 200);

    Json res = Json::object();
    res.set("fundamental", steady_json(fundamental));
    res.set("bubbly", steady_json(bubbly));
    Json analytic = Json::object();
    analytic.set("bubbly_eigenvalues",
                 report::from_vec({m.beta * m.a / m.b, m.G_d / m.G}));
    analytic.set("fundamental_eigenvalues",
                 report::from_vec({m.b / (m.beta * m.a), m.G_d / m.G}));
    analytic.set("bubbly_price_coeff", Json(coeff));
    analytic.set("fundamental_rate", Json(sam::fundamental_rate(m)));
    res.set("analytic", std::move(analytic));
    res.set("necessity", necessity_json(inj.necessity));

    dynsys::Classification overall = bubbly.verdict.classification;
    if (overall == dynsys::Classification::LocallyDeterminate && !inj.necessity_ok)
        overall = dynsys::Classification::Indeterminate;
    res.set("overall", Json(dynsys::to_string(overall)));
    return res;
}

struct SamuelsonPathBundle {
    models::samuelson::Path levels;
    dynsys::EquilibriumPath xi;
    bool injected = false;
};

inline SamuelsonPathBundle samuelson_build_path(const ScenarioConfig& cfg) {
    namespace sam = models::samuelson;
    const auto& m = *cfg.samuelson;
    SamuelsonPathBundle out;
    if (m.D0 > 0.0) {
        sam::Injected inj = sam::make_injected(m);
        dynsys::SteadyState bubbly = dynsys::find_fixed_point(
            inj.system, {sam::bubbly_price_coeff(m), 0.0}, cfg.tolerances.solver, 200);
        out.xi = dynsys::solve_saddle_path(inj.system, {m.D0}, bubbly, cfg.horizon,
                                           cfg.tolerances.verify);
        out.levels = sam::to_levels(m, out.xi.states);
        out.injected = true;
    } else {
        if (!cfg.initial_P0)
            throw ToolkitError(ErrorCode::ConfigInvalid,
                               "dividendless path needs initial.P0 (or set D0 > 0 for selection)");
        out.levels = sam::closed_form(m, *cfg.initial_P0, cfg.horizon);
    }
    return out;
}

inline Json samuelson_path_results(const ScenarioConfig& cfg, const SamuelsonPathBundle& b,
                                   std::string* csv) {
    namespace sam = models::samuelson;
    const auto& m = *cfg.samuelson;
    Json res = Json::object();
    if (b.injected) {
        Json sel = Json::object();
        sel.set("initial_price_detrended", Json(b.xi.selected_free_value));
        sel.set("bracket_lo", Json(b.xi.bracket_lo));
        sel.set("bracket_hi", Json(b.xi.bracket_hi));
        sel.set("sign_changes_found", Json(b.xi.sign_changes_found));
        sel.set("max_step_residual", Json(b.xi.max_step_residual));
        sel.set("terminal_deviation", Json(b.xi.terminal_deviation));
        res.set("selection", std::move(sel));
    }
    res.set("periods", Json(b.levels.periods));
    res.set("P", report::from_vec(b.levels.P));
    res.set("p_detrended", report::from_vec(b.levels.p));
    res.set("D", report::from_vec(b.levels.D));
    res.set("c_young", report::from_vec(b.levels.c_y));
    res.set("c_old", report::from_vec(b.levels.c_o));
    res.set("R", report::from_vec(b.levels.R));
    if (b.injected && b.levels.periods >= 2) {
        std::vector<Vec> tail(b.xi.states.end() - std::min<std::size_t>(3, b.xi.states.size()),
                              b.xi.states.end());
        res.set("interest_limit", Json(sam::interest_rate(m, tail[tail.size() - 2], tail.back())));
    }
    if (csv) {
        std::string& s = *csv;
        s = "t,P,p_detrended,D,c_young,c_old,R\n";
        char buf[256];
        for (int t = 0; t <= b.levels.periods; ++t) {
            double R = t < b.levels.periods ? b.levels.R[static_cast<std::size_t>(t)]
                                            : std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t,
                          b.levels.P[static_cast<std::size_t>(t)],
                          b.levels.p[static_cast<std::size_t>(t)],
                          b.levels.D[static_cast<std::size_t>(t)],
                          b.levels.c_y[static_cast<std::size_t>(t)],
                          b.levels.c_o[static_cast<std::size_t>(t)], R);
            s += buf;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Tirole runs
// ---------------------------------------------------------------------------

inline Json tirole_steady_results(const ScenarioConfig& cfg) {
    namespace ti = models::tirole;
    ti::Analysis an = ti::analyze(*cfg.tirole);
    Json res = Json::object();
    Json b = Json::object();
    b.set("k_b", Json(an.bubbly.k_b));
    b.set("stationary_asset_value", Json(an.bubbly.bubble));
    b.set("positive_bubble", Json(an.bubbly.positive()));
    res.set("bubbly", std::move(b));
    Json f = Json::object();
    f.set("k_f", Json(an.fundamental.k_f));
    f.set("R_f", Json(an.fundamental.R_f));
    f.set("above_bubbly", Json(an.fundamental.above_bubbly));
    f.set("all_roots", report::from_vec(an.fundamental.all_roots));
    res.set("fundamental", std::move(f));
    res.set("eis", Json(an.eis));
    res.set("eis_bound", Json(an.bound));
    res.set("suff_cond", Json(an.suff_cond));
    res.set("predicted_determinate", Json(an.predicted_determinate));
    if (cfg.tirole->production.is_cobb_douglas)
        res.set("cobb_douglas_closed_bound", Json(ti::cobb_douglas_closed_bound(*cfg.tirole)));
    res.set("necessity", necessity_json(an.necessity));
    res.set("bubbly_steady", steady_json(an.bubbly_steady));
    res.set("overall", Json(dynsys::to_string(an.overall)));
    return res;
}

struct TirolePathBundle {
    dynsys::EquilibriumPath xi;
};

inline TirolePathBundle tirole_build_path(const ScenarioConfig& cfg) {
    namespace ti = models::tirole;
    const auto& m = *cfg.tirole;
    if (!cfg.initial_k0)
        throw ToolkitError(ErrorCode::ConfigInvalid, "tirole path needs initial.k0");
    if (!(m.D0 > 0.0))
        throw ToolkitError(ErrorCode::ConfigInvalid, "tirole path selection needs D0 > 0");
    ti::BubblyState bs = ti::bubbly_state(m);
    dynsys::MapSystem map = ti::make_map(m);
    map.free_bracket = {0.0, models::wage(m.production, *cfg.initial_k0) * (1.0 - 1e-9)};
    dynsys::SteadyState target =
        dynsys::find_fixed_point(map, bs.point(), cfg.tolerances.solver, 200);
    dynsys::SaddlePathOptions opt;
    opt.scan_points = 64;   // inner solves make map steps costly; the scan only localizes
    opt.shoot_cap = 150;
    TirolePathBundle out;
    out.xi = dynsys::solve_saddle_path(map, {*cfg.initial_k0, m.D0 / m.N0}, target, cfg.horizon,
                                       cfg.tolerances.verify, opt);
    return out;
}

inline Json tirole_path_results(const TirolePathBundle& b, std::string* csv) {
    Json res = Json::object();
    Json sel = Json::object();
    sel.set("initial_asset_value_per_capita", Json(b.xi.selected_free_value));
    sel.set("bracket_lo", Json(b.xi.bracket_lo));
    sel.set("bracket_hi", Json(b.xi.bracket_hi));
    sel.set("sign_changes_found", Json(b.xi.sign_changes_found));
    sel.set("max_step_residual", Json(b.xi.max_step_residual));
    sel.set("terminal_deviation", Json(b.xi.terminal_deviation));
    res.set("selection", std::move(sel));
    Json k = Json::array(), pn = Json::array(), dn = Json::array();
    for (const Vec& s : b.xi.states) {
        k.push(Json(s[0]));
        pn.push(Json(s[1]));
        dn.push(Json(s[2]));
    }
    res.set("k", std::move(k));
    res.set("asset_value_per_capita", std::move(pn));
    res.set("dividend_per_capita", std::move(dn));
    if (csv) {
        std::string& s = *csv;
        s = "t,k,asset_value_per_capita,dividend_per_capita\n";
        char buf[200];
        for (std::size_t t = 0; t < b.xi.states.size(); ++t) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g\n", t, b.xi.states[t][0],
                          b.xi.states[t][1], b.xi.states[t][2]);
            s += buf;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Kocherlakota / storage / custom reduced-form runs
// ---------------------------------------------------------------------------

inline Json kocherlakota_steady_results(const ScenarioConfig& cfg) {
    namespace ko = models::kocherlakota;
    const auto& m = *cfg.kocherlakota;
    reduced::ReducedFormEconomy econ = ko::make_reduced_form(m);
    auto [lo, hi] = ko::fundamental_bracket(m);
    Json res = Json::object();
    res.set("R_f_closed_form", Json(ko::fundamental_rate(m)));
    res.set("low_interest", Json(ko::low_interest(m)));
    if (ko::low_interest(m)) {
        reduced::BubbleSolution sol =
            reduced::solve_bubble(econ, lo, hi, cfg.tolerances.solver, cfg.tolerances.bubbly);
        res.set("R_f", Json(sol.R_f));
        res.set("R_b", Json(sol.R_b));
        res.set("saving_rate_at_Rb", Json(sol.saving_rate_at_Rb));
        res.set("bubbly_price_coeff", Json(ko::bubbly_price_coeff(m)));
    } else {
        res.set("R_f", Json(reduced::solve_fundamental_rate(econ, lo, hi, cfg.tolerances.solver)));
        res.set("R_b", Json::null());
        res.set("bubbly_price_coeff", Json::null());
    }
    return res;
}

inline Json storage_steady_results(const ScenarioConfig& cfg) {
    namespace sr = models::storage_risk;
    const auto& m = *cfg.storage;
    reduced::ReducedFormEconomy econ = sr::make_reduced_form(m);
    Json res = Json::object();
    res.set("R_f_closed_form", Json(sr::fundamental_rate(m)));
    res.set("mean_z", Json(m.mean_z()));
    res.set("mean_inv_z", Json(m.mean_inv_z()));
    res.set("bubble_condition", Json(sr::bubble_condition(m)));
    auto [lo, hi] = sr::fundamental_bracket(m);
    double R_f = reduced::solve_fundamental_rate(econ, lo, hi, cfg.tolerances.solver);
    res.set("R_f", Json(R_f));
    sr::PortfolioChoice at_rf = sr::portfolio(m, R_f);
    res.set("eta_at_Rf", Json(at_rf.eta));
    res.set("foc_residual_at_Rf", Json(at_rf.foc_residual));
    if (sr::bubble_condition(m)) {
        double R_b = reduced::solve_bubbly_rate(econ, R_f, m.mean_z(), cfg.tolerances.bubbly);
        sr::PortfolioChoice at_rb = sr::portfolio(m, R_b);
        res.set("R_b", Json(R_b));
        res.set("eta_at_Rb", Json(at_rb.eta));
        res.set("saving_rate_at_Rb", Json(1.0 - at_rb.eta));
    } else {
        res.set("R_b", Json::null());
        res.set("eta_at_Rb", Json::null());
        res.set("saving_rate_at_Rb", Json::null());
    }
    return res;
}

inline Json custom_steady_results(const ScenarioConfig& cfg) {
    const auto& m = *cfg.custom;
    reduced::ReducedFormEconomy econ = custom_economy(m);
    Json res = Json::object();
    reduced::BubbleSolution sol = reduced::solve_bubble(econ, m.bracket_lo, m.bracket_hi,
                                                        cfg.tolerances.solver, cfg.tolerances.bubbly);
    res.set("R_f", Json(sol.R_f));
    res.set("R_b", Json(sol.R_b));
    res.set("saving_rate_at_Rb", Json(sol.saving_rate_at_Rb));
    return res;
}

// ---------------------------------------------------------------------------
// Leverage runs
// ---------------------------------------------------------------------------

inline Json leverage_state_json(const models::leverage::State& st) {
    Json j = Json::object();
    j.set("y", Json(st.y));
    j.set("omega", Json(st.omega));
    j.set("R", Json(st.R));
    j.set("P", Json(st.P));
    j.set("W", Json(st.W));
    j.set("K_H", Json(st.K_H));
    j.set("K_L", Json(st.K_L));
    return j;
}

inline Json leverage_steady_results(const ScenarioConfig& cfg) {
    namespace lev = models::leverage;
    lev::Params m = *cfg.leverage;
    m.D = 0.0;  // balanced growth paths are defined for the dividendless economy
    lev::State f = lev::fundamental(m);
    lev::State b = lev::bubbly(m);
    Json res = Json::object();
    res.set("fundamental", leverage_state_json(f));
    res.set("bubbly", leverage_state_json(b));
    res.set("wealth_growth_residual_fundamental", Json(lev::wealth_growth(m, f.y, f.R) - m.G));
    res.set("wealth_growth_residual_bubbly", Json(lev::wealth_growth(m, b.y, b.R) - m.G));
    return res;
}

inline Json leverage_determinacy_results(const ScenarioConfig& cfg) {
    namespace lev = models::leverage;
    const auto& m = *cfg.leverage;
    if (!(m.D > 0.0))
        throw ToolkitError(ErrorCode::ConfigInvalid, "determinacy analyzes the injected system; set D > 0");
    lev::Injected inj = lev::make_injected(m);
    Json res = Json::object();
    res.set("y_b", Json(inj.y_b));
    res.set("lambda1", Json(lev::lambda1(m, inj.y_b)));
    res.set("lambda2", Json(1.0 / m.G));
    res.set("curvature_condition", Json(lev::curvature_condition(m, inj.y_b)));
    res.set("elasticity", Json(models::elasticity_at(m.production, inj.y_b)));
    res.set("elasticity_bound", Json(lev::elasticity_bound(m, inj.y_b)));
    res.set("predicted_determinate",
            Json(models::elasticity_at(m.production, inj.y_b) > lev::elasticity_bound(m, inj.y_b)));
    dynsys::SteadyState ss =
        dynsys::find_fixed_point(inj.system, {inj.y_b, 0.0}, cfg.tolerances.solver, 200);
    res.set("bubbly_steady", steady_json(ss));
    res.set("necessity", necessity_json(inj.necessity));
    dynsys::Classification overall = ss.verdict.classification;
    if (overall == dynsys::Classification::LocallyDeterminate && !inj.necessity_ok)
        overall = dynsys::Classification::Indeterminate;
    res.set("overall", Json(dynsys::to_string(overall)));
    return res;
}

struct LeveragePathBundle {
    models::leverage::SimulatedPath sp;
    double y_b = 0.0;
};

inline LeveragePathBundle leverage_build_path(const ScenarioConfig& cfg) {
    namespace lev = models::leverage;
    const auto& m = *cfg.leverage;
    LeveragePathBundle out;
    lev::Params probe = m;
    probe.D = 0.0;
    out.y_b = lev::bubbly(probe).y;
    double y0 = cfg.initial_y0 ? *cfg.initial_y0 : out.y_b;
    out.sp = lev::simulate_injected(m, y0, cfg.horizon);
    return out;
}

inline Json leverage_path_results(const LeveragePathBundle& b, std::string* csv) {
    Json res = Json::object();
    res.set("y_b", Json(b.y_b));
    res.set("terminal_gap", Json(std::abs(b.sp.y.back() - b.y_b)));
    res.set("admissible", Json(b.sp.admissible));
    res.set("first_violation", Json(b.sp.first_violation));
    res.set("y", report::from_vec(b.sp.y));
    res.set("W", report::from_vec(b.sp.W));
    res.set("P", report::from_vec(b.sp.P));
    res.set("K_H", report::from_vec(b.sp.K_H));
    res.set("R", report::from_vec(b.sp.R));
    if (csv) {
        std::string& s = *csv;
        s = "t,y,W,P,K_H,R\n";
        char buf[256];
        for (std::size_t t = 0; t < b.sp.y.size(); ++t) {
            double W = t < b.sp.W.size() ? b.sp.W[t] : std::numeric_limits<double>::quiet_NaN();
            double P = t < b.sp.P.size() ? b.sp.P[t] : std::numeric_limits<double>::quiet_NaN();
            double K = t < b.sp.K_H.size() ? b.sp.K_H[t] : std::numeric_limits<double>::quiet_NaN();
            double R = t < b.sp.R.size() ? b.sp.R[t] : std::numeric_limits<double>::quiet_NaN();
            std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", t, b.sp.y[t], W,
                          P, K, R);
            s += buf;
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Sweep rows: an ordered flat list of scalar metrics, rendered into both the
// JSON report and the CSV table.
// ---------------------------------------------------------------------------

struct Cell {
    enum class Kind { Num, Bool, Str, Null } kind = Kind::Null;
    double num = 0.0;
    bool flag = false;
    std::string str;

    Cell() = default;
    Cell(double v) : kind(Kind::Num), num(v) {}
    Cell(bool v) : kind(Kind::Bool), flag(v) {}
    Cell(const char* s) : kind(Kind::Str), str(s) {}
    Cell(std::string s) : kind(Kind::Str), str(std::move(s)) {}

    [[nodiscard]] Json to_json() const {
        switch (kind) {
            case Kind::Num: return Json(num);
            case Kind::Bool: return Json(flag);
            case Kind::Str: return Json(str);
            case Kind::Null: return Json::null();
        }
        return Json::null();
    }

    [[nodiscard]] std::string to_csv() const {
        switch (kind) {
            case Kind::Num: {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.17g", num);
                return buf;
            }
            case Kind::Bool: return flag ? "true" : "false";
            case Kind::Str: {
                if (str.find_first_of(",\"\n") == std::string::npos) return str;
                std::string out = "\"";
                for (char c : str) {
                    if (c == '"') out += "\"\"";
                    else out.push_back(c);
                }
                out += "\"";
                return out;
            }
            case Kind::Null: return "";
        }
        return "";
    }
};

using FlatRow = std::vector<std::pair<std::string, Cell>>;

inline FlatRow sweep_row(const ScenarioConfig& cfg) {
    FlatRow row;
    if (cfg.samuelson) {
        namespace sam = models::samuelson;
        const auto& m = *cfg.samuelson;
        reduced::NecessityVerdict nec = reduced::check_necessity(sam::fundamental_rate(m), m.G_d, m.G);
        auto verdict = dynsys::classify_determinacy(
            eigenvalues(sam::injected_jacobian(m, {sam::bubbly_price_coeff(m), 0.0})), 1);
        dynsys::Classification overall = verdict.classification;
        if (overall == dynsys::Classification::LocallyDeterminate && !nec.eliminated())
            overall = dynsys::Classification::Indeterminate;
        row.emplace_back("R_f", Cell(sam::fundamental_rate(m)));
        row.emplace_back("eig_unstable", Cell(m.beta * m.a / m.b));
        row.emplace_back("eig_stable", Cell(m.G_d / m.G));
        row.emplace_back("eliminated", Cell(nec.eliminated()));
        row.emplace_back("local_verdict", Cell(dynsys::to_string(verdict.classification)));
        row.emplace_back("overall", Cell(dynsys::to_string(overall)));
    } else if (cfg.tirole) {
        namespace ti = models::tirole;
        ti::Analysis an = ti::analyze(*cfg.tirole);
        row.emplace_back("k_b", Cell(an.bubbly.k_b));
        row.emplace_back("k_f", Cell(an.fundamental.k_f));
        row.emplace_back("R_f", Cell(an.fundamental.R_f));
        row.emplace_back("bubble", Cell(an.bubbly.bubble));
        row.emplace_back("eis", Cell(an.eis));
        row.emplace_back("eis_bound", Cell(an.bound));
        row.emplace_back("predicted_determinate", Cell(an.predicted_determinate));
        row.emplace_back("suff_cond_positive", Cell(an.suff_cond > 0.0));
        row.emplace_back("eliminated", Cell(an.necessity.eliminated()));
        row.emplace_back("local_verdict",
                         Cell(dynsys::to_string(an.bubbly_steady.verdict.classification)));
        row.emplace_back("overall", Cell(dynsys::to_string(an.overall)));
    } else if (cfg.kocherlakota) {
        namespace ko = models::kocherlakota;
        const auto& m = *cfg.kocherlakota;
        row.emplace_back("R_f", Cell(ko::fundamental_rate(m)));
        row.emplace_back("low_interest", Cell(ko::low_interest(m)));
        row.emplace_back("bubbly_price_coeff",
                         ko::low_interest(m) ? Cell(ko::bubbly_price_coeff(m)) : Cell());
    } else if (cfg.leverage) {
        namespace lev = models::leverage;
        lev::Params m = *cfg.leverage;
        lev::Params probe = m;
        probe.D = 0.0;
        double y_b = lev::bubbly(probe).y;
        double y_f = lev::fundamental(probe).y;
        auto verdict =
            dynsys::classify_determinacy(eigenvalues(lev::injected_jacobian(m, {y_b, 0.0})), 2);
        row.emplace_back("y_f", Cell(y_f));
        row.emplace_back("y_b", Cell(y_b));
        row.emplace_back("lambda1", Cell(lev::lambda1(m, y_b)));
        row.emplace_back("curvature_condition", Cell(lev::curvature_condition(m, y_b)));
        row.emplace_back("elasticity", Cell(models::elasticity_at(m.production, y_b)));
        row.emplace_back("elasticity_bound", Cell(lev::elasticity_bound(m, y_b)));
        row.emplace_back("predicted_determinate",
                         Cell(models::elasticity_at(m.production, y_b) >
                              lev::elasticity_bound(m, y_b)));
        row.emplace_back("local_verdict", Cell(dynsys::to_string(verdict.classification)));
    } else if (cfg.storage) {
        namespace sr = models::storage_risk;
        const auto& m = *cfg.storage;
        row.emplace_back("R_f", Cell(sr::fundamental_rate(m)));
        row.emplace_back("bubble_condition", Cell(sr::bubble_condition(m)));
        if (sr::bubble_condition(m)) {
            reduced::ReducedFormEconomy econ = sr::make_reduced_form(m);
            double R_b = reduced::solve_bubbly_rate(econ, sr::fundamental_rate(m), m.mean_z(),
                                                    cfg.tolerances.bubbly);
            row.emplace_back("R_b", Cell(R_b));
            row.emplace_back("saving_rate_at_Rb", Cell(1.0 - sr::portfolio(m, R_b).eta));
        } else {
            row.emplace_back("R_b", Cell());
            row.emplace_back("saving_rate_at_Rb", Cell());
        }
    } else {
        throw ToolkitError(ErrorCode::ConfigInvalid, "model does not support sweeps");
    }
    return row;
}

}  // namespace detail

// One row per grid point; row-level failures are recorded and the sweep
// continues. Rows are emitted in grid order. (The core is pure, so rows could
// run concurrently; sequential execution keeps the tool dependency-free and
// is instant at desk scale.)
inline RunOutput run_sweep_rows(const ScenarioConfig& cfg) {
    if (!cfg.sweep) throw ToolkitError(ErrorCode::ConfigInvalid, "sweep run needs a sweep block");
    RunOutput out;
    Json rows = Json::array();
    std::vector<std::string> columns{cfg.sweep->parameter};
    std::vector<detail::FlatRow> flat_rows;
    std::vector<std::string> errors;

    for (double value : cfg.sweep->grid) {
        detail::FlatRow flat;
        std::string error;
        try {
            ScenarioConfig point = cfg;
            apply_sweep_value(point, cfg.sweep->parameter, value);
            flat = detail::sweep_row(point);
        } catch (const ToolkitError& e) {
            error = e.what();
            ++out.row_errors;
        }
        for (const auto& [k, v] : flat) {
            bool known = false;
            for (const auto& c : columns)
                if (c == k) known = true;
            if (!known) columns.push_back(k);
        }
        Json row = Json::object();
        row.set(cfg.sweep->parameter, Json(value));
        Json metrics = Json::object();
        for (const auto& [k, v] : flat) metrics.set(k, v.to_json());
        row.set("metrics", error.empty() ? std::move(metrics) : Json::null());
        row.set("error", error.empty() ? Json::null() : Json(error));
        rows.push(std::move(row));
        flat_rows.push_back(std::move(flat));
        errors.push_back(error);
    }

    Json res = Json::object();
    res.set("rows", std::move(rows));
    out.report = std::move(res);

    // CSV table: parameter column, metric columns, trailing error column.
    std::string& csv = out.csv;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        csv += detail::Cell(columns[c]).to_csv();
        csv.push_back(',');
    }
    csv += "error\n";
    for (std::size_t r = 0; r < flat_rows.size(); ++r) {
        csv += detail::Cell(cfg.sweep->grid[r]).to_csv();
        for (std::size_t c = 1; c < columns.size(); ++c) {
            csv.push_back(',');
            std::string cell;
            for (const auto& [k, v] : flat_rows[r])
                if (k == columns[c]) cell = v.to_csv();
            csv += cell;
        }
        csv.push_back(',');
        csv += detail::Cell(errors[r]).to_csv();
        csv.push_back('\n');
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scenario dispatch
// ---------------------------------------------------------------------------

inline RunOutput run_scenario(const ScenarioConfig& cfg) {
    RunOutput out;
    Json results = Json::object();

    switch (cfg.run) {
        case RunKind::Sweep:
            out = run_sweep_rows(cfg);
            results = std::move(out.report);
            break;

        case RunKind::Steady:
        case RunKind::Determinacy: {
            if (cfg.samuelson) {
                results = detail::samuelson_steady_results(cfg);
            } else if (cfg.tirole) {
                results = detail::tirole_steady_results(cfg);
            } else if (cfg.kocherlakota) {
                if (cfg.run == RunKind::Determinacy)
                    detail::unsupported(cfg, "exposed through its reduced form; run steady");
                results = detail::kocherlakota_steady_results(cfg);
            } else if (cfg.leverage) {
                results = cfg.run == RunKind::Determinacy
                              ? detail::leverage_determinacy_results(cfg)
                              : detail::leverage_steady_results(cfg);
            } else if (cfg.storage) {
                if (cfg.run == RunKind::Determinacy)
                    detail::unsupported(cfg, "exposed through its reduced form; run steady");
                results = detail::storage_steady_results(cfg);
            } else if (cfg.custom) {
                if (cfg.run == RunKind::Determinacy)
                    detail::unsupported(cfg, "custom reduced forms support steady only");
                results = detail::custom_steady_results(cfg);
            }
            break;
        }

        case RunKind::Path:
        case RunKind::Verify: {
            bool want_verify = cfg.run == RunKind::Verify;
            if (cfg.samuelson) {
                detail::SamuelsonPathBundle b = detail::samuelson_build_path(cfg);
                results = detail::samuelson_path_results(cfg, b, &out.csv);
                if (want_verify) {
                    diag::ResidualReport rep =
                        diag::verify_samuelson(*cfg.samuelson, b.levels, cfg.tolerances.verify);
                    results.set("residuals", detail::residuals_json(rep));
                    if (cfg.samuelson->D0 > 0.0) {
                        results.set("elimination_certificate",
                                    detail::certificate_json(diag::certify_elimination(
                                        models::samuelson::fundamental_rate(*cfg.samuelson),
                                        cfg.samuelson->G_d, cfg.samuelson->G, cfg.samuelson->D0)));
                    }
                    out.verification_pass = rep.pass;
                }
            } else if (cfg.tirole) {
                detail::TirolePathBundle b = detail::tirole_build_path(cfg);
                results = detail::tirole_path_results(b, &out.csv);
                if (want_verify) {
                    diag::ResidualReport rep =
                        diag::verify_tirole(*cfg.tirole, b.xi.states, cfg.tolerances.verify);
                    results.set("residuals", detail::residuals_json(rep));
                    out.verification_pass = rep.pass;
                }
            } else if (cfg.leverage) {
                detail::LeveragePathBundle b = detail::leverage_build_path(cfg);
                results = detail::leverage_path_results(b, &out.csv);
                if (want_verify) {
                    diag::ResidualReport rep =
                        diag::verify_leverage(*cfg.leverage, b.sp, cfg.tolerances.verify);
                    results.set("residuals", detail::residuals_json(rep));
                    out.verification_pass = rep.pass;
                }
            } else {
                detail::unsupported(cfg, "no path construction for this model");
            }
            break;
        }
    }

    Json full = Json::object();
    full.set("tool", Json("bubblesolve"));
    full.set("version", Json("0.1.0"));
    full.set("scenario", detail::scenario_echo(cfg));
    full.set("results", std::move(results));
    // Callers append timing_ms last: null by default so identical configs
    // serialize to identical bytes, a measured value behind an explicit flag.
    out.report = std::move(full);
    return out;
}

// Gnuplot script consuming the CSV written next to it: price paths for path
// runs, the swept metric for sweep runs.
inline std::string plot_script(const ScenarioConfig& cfg, const std::string& csv_path) {
    std::string s = "# gnuplot script generated by bubblesolve\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    if (cfg.run == RunKind::Sweep) {
        s += "set xlabel '" + (cfg.sweep ? cfg.sweep->parameter : std::string("parameter")) + "'\n";
        s += "plot '" + csv_path + "' using 1:2 with linespoints\n";
    } else {
        s += "set xlabel 't'\n";
        s += "plot '" + csv_path + "' using 1:2 with lines\n";
        if (cfg.samuelson) {
            s += "# phase-diagram sample: detrended price against the dividend scale\n";
            s += "# plot '" + csv_path + "' using 3:4 with points\n";
        }
    }
    return s;
}

}  // namespace bubblesolve::cli
