#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/roots.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::models::storage_risk {

// Infinite-horizon economy with log utility and an iid productivity draw z
// on investment: wealth share eta goes into the risky technology, the rest
// into the risk-free asset at rate R. Finite support keeps every expectation
// an exact sum.
struct Params {
    double beta = 0.0;
    std::vector<std::pair<double, double>> z_dist;  // (value, probability)

    void validate() const {
        if (!(beta > 0.0) || !(beta < 1.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "storage_risk requires beta in (0,1)");
        if (z_dist.empty())
            throw ToolkitError(ErrorCode::ConfigInvalid, "storage_risk requires a z distribution");
        double total = 0.0;
        for (auto [z, p] : z_dist) {
            if (!(z > 0.0))
                throw ToolkitError(ErrorCode::ConfigInvalid, "productivity outcomes must be positive");
            if (p < 0.0)
                throw ToolkitError(ErrorCode::ConfigInvalid, "probabilities must be nonnegative");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw ToolkitError(ErrorCode::ConfigInvalid, "probabilities must sum to 1");
    }

    [[nodiscard]] double mean_z() const {
        double s = 0.0;
        for (auto [z, p] : z_dist) s += p * z;
        return s;
    }
    [[nodiscard]] double mean_inv_z() const {
        double s = 0.0;
        for (auto [z, p] : z_dist) s += p / z;
        return s;
    }
    [[nodiscard]] double min_z() const {
        double m = std::numeric_limits<double>::infinity();
        for (auto [z, p] : z_dist)
            if (p > 0.0) m = std::min(m, z);
        return m;
    }
    [[nodiscard]] double max_z() const {
        double m = 0.0;
        for (auto [z, p] : z_dist)
            if (p > 0.0) m = std::max(m, z);
        return m;
    }
    [[nodiscard]] bool degenerate() const { return min_z() == max_z(); }
};

// First-order condition of max E[log(z eta + R(1-eta))]: E[(z-R)/(z eta + R(1-eta))].
inline double portfolio_foc(const Params& prm, double R, double eta) {
    double s = 0.0;
    for (auto [z, p] : prm.z_dist) s += p * (z - R) / (z * eta + R * (1.0 - eta));
    return s;
}

enum class PortfolioKind {
    Interior,     // unique root of the FOC in (0, eta_max)
    SafeCorner,   // eta = 0: the risk-free asset dominates on average
    Indifferent,  // degenerate z equal to R: any split is optimal
};

struct PortfolioChoice {
    double eta = 0.0;
    PortfolioKind kind = PortfolioKind::Interior;
    double indifference_lo = 0.0;  // populated for Indifferent
    double indifference_hi = 0.0;
    double foc_residual = 0.0;
};

// Optimal risky share at rate R. The natural constraint keeps every outcome
// positive: eta < R/(R - z_min) when z_min < R. For R at or below every
// outcome the objective increases without bound in eta.
inline PortfolioChoice portfolio(const Params& prm, double R) {
    if (!(R > 0.0)) throw ToolkitError(ErrorCode::PreconditionFailed, "R must be positive");
    for (auto [z, p] : prm.z_dist)
        if (p > 0.0 && !(z > 0.0))
            throw ToolkitError(ErrorCode::InfeasiblePortfolio, "nonpositive outcome in support");

    PortfolioChoice out;
    if (prm.degenerate()) {
        double z = prm.min_z();
        if (R > z) {
            out.kind = PortfolioKind::SafeCorner;
            out.eta = 0.0;
        } else if (R == z) {
            out.kind = PortfolioKind::Indifferent;
            out.indifference_lo = 0.0;
            out.indifference_hi = 1.0;
            out.eta = 0.5;  // midpoint selection
        } else {
            throw ToolkitError(ErrorCode::PreconditionFailed,
                               "riskless technology dominates: the portfolio is unbounded");
        }
        return out;
    }

    if (prm.mean_z() <= R) {
        out.kind = PortfolioKind::SafeCorner;
        out.eta = 0.0;
        out.foc_residual = portfolio_foc(prm, R, 0.0);
        return out;
    }
    if (prm.min_z() >= R)
        throw ToolkitError(ErrorCode::PreconditionFailed,
                           "every outcome weakly beats the risk-free rate: unbounded portfolio");

    double eta_max = R / (R - prm.min_z());
    auto g = [&](double eta) { return portfolio_foc(prm, R, eta); };
    double hi = eta_max * (1.0 - 1e-12);
    out.eta = bisect(g, 0.0, hi, {.xtol = 1e-14 * std::max(1.0, eta_max), .ftol = 0.0, .max_iter = 300});
    out.kind = PortfolioKind::Interior;
    out.foc_residual = portfolio_foc(prm, R, out.eta);
    return out;
}

// Wealth growth G(R) = beta E[z eta(R) + R (1 - eta(R))].
inline double growth(const Params& prm, double R) {
    PortfolioChoice pc = portfolio(prm, R);
    double s = 0.0;
    for (auto [z, p] : prm.z_dist) s += p * (z * pc.eta + R * (1.0 - pc.eta));
    return prm.beta * s;
}

// Risk-free demand per unit of wealth: s(R) = 1 - eta(R).
inline reduced::Interval saving(const Params& prm, double R) {
    PortfolioChoice pc = portfolio(prm, R);
    if (pc.kind == PortfolioKind::Indifferent)
        return reduced::Interval(1.0 - pc.indifference_hi, 1.0 - pc.indifference_lo);
    return reduced::Interval(1.0 - pc.eta);
}

// Fundamental rate: eta = 1 clears the risk-free market, so R_f = 1/E[1/z].
inline double fundamental_rate(const Params& prm) { return 1.0 / prm.mean_inv_z(); }

// Bubble existence condition beta E[z] E[1/z] > 1.
inline bool bubble_condition(const Params& prm) { return prm.beta * prm.mean_z() * prm.mean_inv_z() > 1.0; }

inline reduced::ReducedFormEconomy make_reduced_form(const Params& prm) {
    prm.validate();
    reduced::ReducedFormEconomy econ;
    econ.name = "storage_risk";
    econ.growth = [prm](double R) { return growth(prm, R); };
    econ.saving = [prm](double R) { return saving(prm, R); };
    econ.growth_jump_bound = 0.5;  // continuous but not constant; generous modulus
    econ.assumption1_threshold = prm.mean_z();
    return econ;
}

// Bracket for the fundamental-rate bisection: the saving rate is negative
// just above the lowest outcome (leverage is attractive) and positive just
// below the mean outcome.
inline std::pair<double, double> fundamental_bracket(const Params& prm) {
    return {prm.min_z() * 1.05, prm.mean_z() * 0.999};
}

}  // namespace bubblesolve::models::storage_risk
