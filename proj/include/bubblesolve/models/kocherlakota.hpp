#pragma once

#include <cmath>
#include <utility>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::models::kocherlakota {

// Two-agent exchange economy with CRRA preferences and endowments that
// alternate between a G^t and b G^t. Exposed through its growth/saving
// reduced form; the rich agent's savings demand pins down the rates.
struct Params {
    double a = 0.0;      // high endowment level
    double b = 0.0;      // low endowment level
    double beta = 0.0;   // discount factor
    double gamma = 0.0;  // relative risk aversion
    double G = 0.0;      // gross endowment growth

    void validate() const {
        if (!(a > b) || !(b > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "kocherlakota requires a > b > 0");
        if (!(beta > 0.0) || !(beta < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "kocherlakota requires beta in (0,1)");
        if (!(gamma > 0.0) || !(G > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "kocherlakota requires gamma > 0 and G > 0");
        if (!(beta * std::pow(G, 1.0 - gamma) < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid,
                               "equilibrium existence requires beta * G^(1-gamma) < 1");
    }
};

// Saving rate of the rich agent per unit of wealth a G^t:
// s(R) = ((beta R)^(1/gamma) - (b/a) G) / (R + (beta R)^(1/gamma)).
inline double saving_rate(const Params& p, double R) {
    if (!(R > 0.0)) throw ToolkitError(ErrorCode::NonFiniteSaving, "saving undefined for R <= 0");
    double br = std::pow(p.beta * R, 1.0 / p.gamma);
    return (br - (p.b / p.a) * p.G) / (R + br);
}

// Fundamental rate in closed form: s(R_f) = 0 gives R_f = (1/beta)((b/a) G)^gamma.
inline double fundamental_rate(const Params& p) {
    return std::pow((p.b / p.a) * p.G, p.gamma) / p.beta;
}

// Low interest condition G > R_f, equivalently b < (beta G^(1-gamma))^(1/gamma) a.
inline bool low_interest(const Params& p) { return p.G > fundamental_rate(p); }

inline bool low_interest_closed_form(const Params& p) {
    return p.b < std::pow(p.beta * std::pow(p.G, 1.0 - p.gamma), 1.0 / p.gamma) * p.a;
}

// Detrended price of the bubbly balanced growth path:
// P_t = ((beta G^(1-gamma))^(1/gamma) a - b) / (1 + (beta G^(1-gamma))^(1/gamma)) G^t.
inline double bubbly_price_coeff(const Params& p) {
    double m = std::pow(p.beta * std::pow(p.G, 1.0 - p.gamma), 1.0 / p.gamma);
    return (m * p.a - p.b) / (1.0 + m);
}

inline reduced::ReducedFormEconomy make_reduced_form(const Params& p) {
    p.validate();
    reduced::ReducedFormEconomy econ;
    econ.name = "kocherlakota";
    econ.growth = [G = p.G](double) { return G; };
    econ.saving = [p](double R) { return reduced::Interval(saving_rate(p, R)); };
    econ.growth_jump_bound = 1e-12;
    econ.assumption1_threshold = p.G;
    return econ;
}

inline std::pair<double, double> fundamental_bracket(const Params& p) {
    double rf = fundamental_rate(p);
    return {0.5 * rf, 2.0 * std::max(p.G, rf)};
}

}  // namespace bubblesolve::models::kocherlakota
