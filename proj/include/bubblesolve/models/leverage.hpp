#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/core/roots.hpp"
#include "bubblesolve/dynsys/system.hpp"
#include "bubblesolve/models/production.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::models::leverage {

// Entrepreneurial economy: investment opportunities arrive with probability
// pi, capital investment is capped at lambda times equity, labor grows at G.
// phi = pi * lambda < 1 measures the financial friction; land is the bubble
// asset and may pay a constant dividend D.
struct Params {
    double beta = 0.0;    // discount factor
    double pi = 0.0;      // investment-opportunity probability
    double lambda = 1.0;  // leverage limit
    double delta = 0.0;   // depreciation
    double G = 0.0;       // gross labor growth
    ProductionSpec production;  // plain technology f(y); depreciation handled separately
    double D = 0.0;       // constant dividend

    [[nodiscard]] double phi() const { return pi * lambda; }
    // Share of savings channeled to productive capital in the injected dynamics.
    [[nodiscard]] double capital_share_factor() const {
        return phi() * beta / (1.0 - beta + phi() * beta);
    }

    void validate() const {
        if (!(beta > 0.0) || !(beta < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires beta in (0,1)");
        if (!(pi > 0.0) || !(pi < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires pi in (0,1)");
        if (!(lambda >= 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires lambda >= 1");
        if (!(delta >= 0.0) || !(delta <= 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires delta in [0,1]");
        if (!(G > 1.0)) throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires G > 1");
        if (!(phi() < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid,
                               "phi = pi*lambda must be < 1 (got " + std::to_string(phi()) + ")");
        if (D < 0.0) throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires D >= 0");
        if (!production.f)
            throw ToolkitError(ErrorCode::ConfigInvalid, "leverage requires a production spec");
    }
};

// Balanced growth path snapshot at t = 0. Stocks K_H, K_L are the holdings
// chosen at t = 0 (installed for t = 1); they satisfy K_H + K_L + P = beta W.
struct State {
    double y = 0.0;      // capital-labor ratio
    double omega = 0.0;  // wage
    double R = 0.0;      // gross risk-free rate
    double P = 0.0;      // land price at t = 0
    double W = 0.0;      // aggregate wealth at t = 0
    double K_H = 0.0;    // productive capital chosen at t = 0
    double K_L = 0.0;    // idle capital chosen at t = 0
};

// Growth factor of aggregate wealth at ratio y and risk-free rate R:
// beta (phi (f'(y) + 1 - delta) + (1 - phi) R).
inline double wealth_growth(const Params& prm, double y, double R) {
    return prm.beta * (prm.phi() * (prm.production.fp(y) + 1.0 - prm.delta) + (1.0 - prm.phi()) * R);
}

namespace detail {

// Solve f'(y) = target by bisection; f' is strictly decreasing.
inline double invert_fp(const ProductionSpec& prod, double target) {
    if (!(target > 0.0))
        throw ToolkitError(ErrorCode::NoRoot, "required return is nonpositive");
    auto g = [&](double y) { return prod.fp(y) - target; };
    double lo = 1e-10;
    if (!(g(lo) > 0.0))
        throw ToolkitError(ErrorCode::NoRoot,
                           "f'(0+) below the required return; probed down to y = 1e-10");
    double hi = 1.0;
    int guard = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200)
            throw ToolkitError(ErrorCode::NoRoot,
                               "f' stays above the required return; probed up to y = " +
                                   std::to_string(hi));
    }
    return bisect(g, lo, hi, {.xtol = 1e-14 * std::max(1.0, hi), .ftol = 0.0, .max_iter = 300});
}

}  // namespace detail

// Fundamental balanced growth path: idle capital pins R = 1 - delta and the
// ratio solves phi f'(y) + 1 - delta = G / beta.
inline State fundamental(const Params& prm) {
    prm.validate();
    if (prm.D != 0.0)
        throw ToolkitError(ErrorCode::PreconditionFailed, "balanced growth requires D = 0");
    State st;
    st.y = detail::invert_fp(prm.production, (prm.G / prm.beta - (1.0 - prm.delta)) / prm.phi());
    st.omega = wage(prm.production, st.y);
    st.R = 1.0 - prm.delta;
    st.P = 0.0;
    st.W = st.y * prm.G / (prm.phi() * prm.beta);
    st.K_H = prm.phi() * prm.beta * st.W;
    st.K_L = (1.0 - prm.phi()) * prm.beta * st.W;
    return st;
}

// Bubbly balanced growth path: land absorbs idle savings, R = G and the
// ratio solves f'(y) + 1 - delta = (1 - beta + phi beta) G / (phi beta).
inline State bubbly(const Params& prm) {
    prm.validate();
    if (prm.D != 0.0)
        throw ToolkitError(ErrorCode::PreconditionFailed, "balanced growth requires D = 0");
    State st;
    st.y = detail::invert_fp(prm.production, prm.G / prm.capital_share_factor() - (1.0 - prm.delta));
    st.omega = wage(prm.production, st.y);
    st.R = prm.G;
    st.W = st.y * prm.G / (prm.phi() * prm.beta);
    st.P = (1.0 - prm.phi()) / prm.phi() * st.y * prm.G;  // equals (1-phi) beta W
    st.K_H = prm.phi() * prm.beta * st.W;
    st.K_L = 0.0;
    return st;
}

// Aggregate capital allocation given resources Res = Y + (1-delta)K (+ D)
// and the land price P.
inline double capital_high(const Params& prm, double resources, double P) {
    return prm.phi() * prm.beta * resources + prm.phi() * prm.beta * P;
}
inline double capital_low(const Params& prm, double resources, double P) {
    return (1.0 - prm.phi()) * prm.beta * resources - (1.0 - prm.beta + prm.phi() * prm.beta) * P;
}
inline double capital_total(const Params& prm, double resources, double P) {
    return prm.beta * resources - (1.0 - prm.beta) * P;
}

// ---------------------------------------------------------------------------
// Dividend-injected dynamics: a two-dimensional autonomous system in
// xi = (y, scaled dividend), with the scaled dividend
// xi2_t = capital_share_factor * D * G^{-t-1}. Both coordinates are inherited
// from history, so the predetermined count is two.
// ---------------------------------------------------------------------------

struct Injected {
    Params params;
    dynsys::MapSystem system;
    double y_b = 0.0;                      // fixed point of the y dynamics
    reduced::NecessityVerdict necessity;   // R_f = 1 - delta < G_d = 1 < G
    bool necessity_ok = false;

    [[nodiscard]] Vec bubbly_point() const { return {y_b, 0.0}; }
    [[nodiscard]] double initial_scaled_dividend() const {
        return params.capital_share_factor() * params.D / params.G;
    }
};

inline Mat injected_jacobian(const Params& prm, const Vec& xi) {
    double c = prm.capital_share_factor() / prm.G;
    double y = xi[0];
    return Mat{{c * (prm.production.fp(y) + 1.0 - prm.delta + y * prm.production.fpp(y)), 1.0},
               {0.0, 1.0 / prm.G}};
}

// Analytic eigenvalue of the injected Jacobian at the bubbly point governing
// determinacy; the other eigenvalue is 1/G.
inline double lambda1(const Params& prm, double y_b) {
    return 1.0 + prm.capital_share_factor() / prm.G * y_b * prm.production.fpp(y_b);
}

// Curvature form of the determinacy condition: y_b f''(y_b) > -2G/(share factor).
inline bool curvature_condition(const Params& prm, double y_b) {
    return y_b * prm.production.fpp(y_b) > -2.0 * prm.G / prm.capital_share_factor();
}

// Elasticity form of the same condition: determinate when the elasticity of
// substitution exceeds (1/2)(1 - share*(1-delta)/G) / (1 + y f'/omega).
inline double elasticity_bound(const Params& prm, double y_b) {
    double om = wage(prm.production, y_b);
    if (!(om > 0.0)) throw ToolkitError(ErrorCode::DegenerateWage, "nonpositive wage at y_b");
    double lead = 0.5 * (1.0 - prm.capital_share_factor() * (1.0 - prm.delta) / prm.G);
    return lead / (1.0 + y_b * prm.production.fp(y_b) / om);
}

inline Injected make_injected(const Params& prm) {
    prm.validate();
    if (!(prm.D > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "dividend injection requires D > 0");
    Injected inj;
    inj.params = prm;
    Params bg = prm;
    bg.D = 0.0;
    inj.y_b = bubbly(bg).y;

    double c = prm.capital_share_factor() / prm.G;
    dynsys::MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {0, 1};
    sys.predetermined_autonomous = true;
    sys.map = [prm, c](const Vec& xi) -> Vec {
        double y = xi[0];
        return {c * y * (prm.production.fp(y) + 1.0 - prm.delta) + xi[1], xi[1] / prm.G};
    };
    sys.analytic_jacobian = [prm](const Vec& xi) { return injected_jacobian(prm, xi); };
    sys.admissible = [](const Vec& xi) { return xi[0] > 0.0 && xi[1] >= 0.0; };
    inj.system = std::move(sys);

    // Constant dividends grow at gross rate one; the fundamental rate is the
    // return on idle capital. Full depreciation pins that rate at zero, which
    // satisfies the elimination inequalities trivially.
    if (prm.delta < 1.0) {
        inj.necessity = reduced::check_necessity(1.0 - prm.delta, 1.0, prm.G);
    } else {
        inj.necessity.R_limit = 0.0;
        inj.necessity.G_d = 1.0;
        inj.necessity.G = prm.G;
        inj.necessity.status = prm.G > 1.0 ? reduced::NecessityStatus::FundamentalEliminated
                                           : reduced::NecessityStatus::DividendsNotNegligible;
    }
    inj.necessity_ok = inj.necessity.eliminated();
    return inj;
}

// ---------------------------------------------------------------------------
// Simulated injected path with reconstructed aggregates, for the accounting
// and residual checks.
// ---------------------------------------------------------------------------

struct SimulatedPath {
    std::vector<double> y;    // y[t], t = 0..T
    std::vector<double> W;    // W[t], t = 0..T-1 (aggregate wealth)
    std::vector<double> P;    // P[t], land price
    std::vector<double> K_H;  // productive capital installed for t (= phi beta W[t-1])
    std::vector<double> K_L;  // idle capital (zero along injected paths)
    std::vector<double> R;    // land return (P[t+1] + D) / P[t], t = 0..T-2
    bool admissible = true;
    int first_violation = -1;
};

inline SimulatedPath simulate_injected(const Params& prm, double y0, int T) {
    prm.validate();
    if (!(y0 > 0.0)) throw ToolkitError(ErrorCode::PreconditionFailed, "y0 must be positive");
    double c = prm.capital_share_factor();
    SimulatedPath sp;
    sp.y.resize(static_cast<std::size_t>(T) + 1);
    sp.y[0] = y0;
    double Gt = 1.0;  // G^t
    for (int t = 0; t < T; ++t) {
        double y = sp.y[static_cast<std::size_t>(t)];
        sp.y[static_cast<std::size_t>(t) + 1] =
            (c / prm.G) * (y * (prm.production.fp(y) + 1.0 - prm.delta) + prm.D / Gt);
        Gt *= prm.G;
    }
    sp.W.resize(static_cast<std::size_t>(T));
    sp.P.resize(static_cast<std::size_t>(T));
    sp.K_H.resize(static_cast<std::size_t>(T) + 1);
    sp.K_L.assign(static_cast<std::size_t>(T) + 1, 0.0);
    Gt = 1.0;
    sp.K_H[0] = y0;  // installed for t = 0 against labor G^0
    for (int t = 0; t < T; ++t) {
        double Gt1 = Gt * prm.G;  // G^{t+1}
        sp.W[static_cast<std::size_t>(t)] = sp.y[static_cast<std::size_t>(t) + 1] * Gt1 /
                                            (prm.phi() * prm.beta);
        sp.P[static_cast<std::size_t>(t)] = (1.0 - prm.phi()) * prm.beta *
                                            sp.W[static_cast<std::size_t>(t)];
        sp.K_H[static_cast<std::size_t>(t) + 1] = prm.phi() * prm.beta *
                                                  sp.W[static_cast<std::size_t>(t)];
        Gt = Gt1;
    }
    sp.R.resize(T >= 2 ? static_cast<std::size_t>(T) - 1 : 0);
    for (int t = 0; t + 1 < T; ++t) {
        sp.R[static_cast<std::size_t>(t)] =
            (sp.P[static_cast<std::size_t>(t) + 1] + prm.D) / sp.P[static_cast<std::size_t>(t)];
        double band_lo = 1.0 - prm.delta - 1e-10;
        double band_hi = prm.production.fp(sp.y[static_cast<std::size_t>(t) + 2]) + 1.0 - prm.delta +
                         1e-10;
        if (sp.admissible &&
            (sp.R[static_cast<std::size_t>(t)] < band_lo || sp.R[static_cast<std::size_t>(t)] > band_hi)) {
            sp.admissible = false;
            sp.first_violation = t;
        }
    }
    return sp;
}

}  // namespace bubblesolve::models::leverage
