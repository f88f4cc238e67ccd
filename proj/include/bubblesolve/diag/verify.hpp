#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/models/leverage.hpp"
#include "bubblesolve/models/samuelson.hpp"
#include "bubblesolve/models/tirole.hpp"

namespace bubblesolve::diag {

struct ConditionResidual {
    std::string name;
    std::vector<double> per_period;
    double max = 0.0;
    bool skipped = false;  // condition undefined along this path (e.g. no-arbitrage at zero price)
};

struct ResidualReport {
    std::vector<ConditionResidual> conditions;
    double overall_max = 0.0;
    double tolerance = 0.0;
    bool pass = false;

    void finish(double tol) {
        tolerance = tol;
        overall_max = 0.0;
        for (auto& c : conditions) {
            c.max = 0.0;
            for (double v : c.per_period) c.max = std::max(c.max, v);
            if (!c.skipped) overall_max = std::max(overall_max, c.max);
        }
        pass = overall_max <= tol;
    }
};

// Residuals of every equilibrium condition of the exchange economy along a
// levels path. All residuals are scaled by the period's endowment so a single
// tolerance is meaningful at any horizon.
inline ResidualReport verify_samuelson(const models::samuelson::Params& prm,
                                       const models::samuelson::Path& path, double tol) {
    prm.validate();
    int T = path.periods;
    if (static_cast<int>(path.P.size()) != T + 1 || static_cast<int>(path.c_y.size()) != T + 1 ||
        static_cast<int>(path.c_o.size()) != T + 1 || static_cast<int>(path.R.size()) < T)
        throw ToolkitError(ErrorCode::ShapeMismatch, "path series lengths do not match periods");

    ResidualReport rep;
    ConditionResidual euler{.name = "euler", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual noarb{.name = "no_arbitrage", .per_period = {}, .max = 0.0, .skipped = true};
    ConditionResidual budget_y{.name = "budget_young", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual budget_o{.name = "budget_old", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual clearing{.name = "market_clearing", .per_period = {}, .max = 0.0, .skipped = false};

    double Gt = 1.0;
    for (int t = 0; t <= T; ++t) {
        double scale = std::max(1.0, (prm.a + prm.b) * Gt);
        double D_t = t < static_cast<int>(path.D.size()) ? path.D[static_cast<std::size_t>(t)] : 0.0;
        budget_y.per_period.push_back(
            std::abs(path.c_y[static_cast<std::size_t>(t)] - (prm.a * Gt - path.P[static_cast<std::size_t>(t)])) / scale);
        budget_o.per_period.push_back(
            std::abs(path.c_o[static_cast<std::size_t>(t)] -
                     (prm.b * Gt + path.P[static_cast<std::size_t>(t)] + D_t)) / scale);
        clearing.per_period.push_back(
            std::abs(path.c_y[static_cast<std::size_t>(t)] + path.c_o[static_cast<std::size_t>(t)] -
                     (prm.a + prm.b) * Gt - D_t) / scale);
        if (t < T) {
            double R_t = path.R[static_cast<std::size_t>(t)];
            euler.per_period.push_back(std::abs(
                prm.beta * R_t * path.c_y[static_cast<std::size_t>(t)] /
                    path.c_o[static_cast<std::size_t>(t) + 1] - 1.0));
            double P_t = path.P[static_cast<std::size_t>(t)];
            if (P_t > 0.0) {
                double D_next =
                    t + 1 < static_cast<int>(path.D.size()) ? path.D[static_cast<std::size_t>(t) + 1] : 0.0;
                noarb.skipped = false;
                noarb.per_period.push_back(
                    std::abs(R_t * P_t - path.P[static_cast<std::size_t>(t) + 1] - D_next) /
                    std::max(1.0, P_t));
            } else {
                noarb.per_period.push_back(0.0);  // undefined at zero price; not counted
            }
        }
        Gt *= prm.G;
    }
    rep.conditions = {euler, noarb, budget_y, budget_o, clearing};
    rep.finish(tol);
    return rep;
}

// Residuals of the production-economy system along a path in
// xi = (k, P/N, D/N) coordinates, split by equation.
inline ResidualReport verify_tirole(const models::tirole::Params& prm, const std::vector<Vec>& states,
                                    double tol) {
    prm.validate();
    if (states.size() < 2) throw ToolkitError(ErrorCode::ShapeMismatch, "path needs at least two states");
    for (const Vec& s : states)
        if (s.size() != 3) throw ToolkitError(ErrorCode::ShapeMismatch, "tirole states have dimension 3");

    dynsys::ImplicitSystem sys = models::tirole::make_system(prm);
    ResidualReport rep;
    ConditionResidual noarb{.name = "no_arbitrage", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual clearing{.name = "market_clearing", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual divgrowth{.name = "dividend_growth", .per_period = {}, .max = 0.0, .skipped = false};
    for (std::size_t t = 0; t + 1 < states.size(); ++t) {
        Vec H = sys.residual(states[t], states[t + 1]);
        double scale = std::max(1.0, inf_norm(states[t]));
        noarb.per_period.push_back(std::abs(H[0]) / scale);
        clearing.per_period.push_back(std::abs(H[1]) / scale);
        divgrowth.per_period.push_back(std::abs(H[2]) / scale);
    }
    rep.conditions = {noarb, clearing, divgrowth};
    rep.finish(tol);
    return rep;
}

// Residuals of the leverage economy along a simulated injected path:
// capital-labor dynamics, the wealth recursion with dividends, the land
// pricing rule, and the rate band.
inline ResidualReport verify_leverage(const models::leverage::Params& prm,
                                      const models::leverage::SimulatedPath& sp, double tol) {
    prm.validate();
    int T = static_cast<int>(sp.y.size()) - 1;
    if (T < 2 || static_cast<int>(sp.W.size()) != T || static_cast<int>(sp.P.size()) != T)
        throw ToolkitError(ErrorCode::ShapeMismatch, "simulated path series lengths do not match");

    ResidualReport rep;
    ConditionResidual dyn{.name = "capital_labor_dynamics", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual wealth{.name = "wealth_recursion", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual price{.name = "land_price_rule", .per_period = {}, .max = 0.0, .skipped = false};
    ConditionResidual band{.name = "rate_band", .per_period = {}, .max = 0.0, .skipped = false};

    double c = prm.capital_share_factor();
    double Gt = 1.0;
    for (int t = 0; t < T; ++t) {
        double y = sp.y[static_cast<std::size_t>(t)];
        double rhs = (c / prm.G) * (y * (prm.production.fp(y) + 1.0 - prm.delta) + prm.D / Gt);
        dyn.per_period.push_back(std::abs(sp.y[static_cast<std::size_t>(t) + 1] - rhs) /
                                 std::max(1.0, y));
        double W_prev = t == 0 ? sp.y[0] / (prm.phi() * prm.beta) * 1.0 : sp.W[static_cast<std::size_t>(t) - 1];
        double scale = std::max(1.0, sp.W[static_cast<std::size_t>(t)]);
        wealth.per_period.push_back(
            std::abs(sp.W[static_cast<std::size_t>(t)] -
                     ((prm.production.fp(y) + 1.0 - prm.delta) * prm.phi() * prm.beta * W_prev +
                      sp.P[static_cast<std::size_t>(t)] + prm.D)) / scale);
        price.per_period.push_back(std::abs(sp.P[static_cast<std::size_t>(t)] -
                                            (1.0 - prm.phi()) * prm.beta * sp.W[static_cast<std::size_t>(t)]) /
                                   scale);
        Gt *= prm.G;
    }
    for (std::size_t t = 0; t < sp.R.size(); ++t) {
        double lo = 1.0 - prm.delta;
        double hi = prm.production.fp(sp.y[t + 2]) + 1.0 - prm.delta;
        double viol = std::max(std::max(lo - sp.R[t], sp.R[t] - hi), 0.0);
        band.per_period.push_back(viol);
    }
    rep.conditions = {dyn, wealth, price, band};
    rep.finish(tol);
    return rep;
}

}  // namespace bubblesolve::diag
