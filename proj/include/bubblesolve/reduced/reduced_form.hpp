#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/roots.hpp"

namespace bubblesolve::reduced {

// Saving correspondences are interval-valued: every model here yields a
// singleton except at indifference points, where the midpoint is selected
// and the ambiguity is flagged.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double v) : lo(v), hi(v) {}
    Interval(double l, double h) : lo(l), hi(h) {}

    [[nodiscard]] double midpoint() const { return 0.5 * (lo + hi); }
    [[nodiscard]] bool ambiguous() const { return hi > lo; }
};

// Aggregate economy in growth/saving form: wealth evolves at gross rate
// G(R) and the demand for the risk-free asset per unit of wealth is s(R).
struct ReducedFormEconomy {
    std::function<double(double)> growth;     // R -> G(R)
    std::function<Interval(double)> saving;   // R -> s(R), interval-valued
    double asset_supply = 0.0;                // zero net supply throughout
    double growth_jump_bound = 0.1;           // continuity modulus for the sampling check
    double assumption1_threshold = 0.0;       // G(R) < R required for R above this
    std::string name;
};

// Midpoint selection of the saving correspondence.
inline double saving_value(const ReducedFormEconomy& econ, double R) {
    Interval s = econ.saving(R);
    double v = s.midpoint();
    if (!std::isfinite(v)) throw ToolkitError(ErrorCode::NonFiniteSaving, "saving rate not finite");
    return v;
}

// Fundamental rate: s(R_f) = 0, located by bisection on a caller bracket.
inline double solve_fundamental_rate(const ReducedFormEconomy& econ, double lo, double hi,
                                     double tol = 1e-12) {
    auto f = [&](double R) { return saving_value(econ, R); };
    double flo = f(lo), fhi = f(hi);
    if ((flo > 0.0) == (fhi > 0.0) && flo != 0.0 && fhi != 0.0)
        throw ToolkitError(ErrorCode::NoSignChange,
                           "saving rate does not straddle zero on [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
    BisectOptions opt;
    opt.xtol = tol * std::max(1.0, std::abs(hi));
    opt.ftol = tol;
    opt.max_iter = 400;
    return bisect(f, lo, hi, opt);
}

// Bubbly rate: G(R_b) = R_b on (R_f, upper). Requires the low interest gap
// G(R_f) > R_f; the growth assumption G(R) < R for large R supplies a sign
// change before `upper`.
inline double solve_bubbly_rate(const ReducedFormEconomy& econ, double R_f, double upper,
                                double tol = 1e-10) {
    auto g = [&](double R) { return econ.growth(R) - R; };
    double lo = R_f + 1e-9;
    if (g(lo) <= 0.0)
        throw ToolkitError(ErrorCode::PreconditionFailed,
                           "no low-interest gap: G(R_f) <= R_f at R_f = " + std::to_string(R_f));
    if (g(upper) >= 0.0)
        throw ToolkitError(ErrorCode::NoSignChange,
                           "G(R) >= R still at upper = " + std::to_string(upper));
    BisectOptions opt;
    opt.xtol = 1e-15 * std::max(1.0, upper);
    opt.ftol = tol;
    opt.max_iter = 400;
    return bisect(g, lo, upper, opt);
}

inline double default_bubbly_upper(const ReducedFormEconomy& econ, double R_f) {
    // Sample G over a decade of rates and take a generous multiple.
    double sup_g = 0.0;
    for (int i = 0; i <= 100; ++i) {
        double R = R_f + (10.0 - R_f) * i / 100.0;
        if (R <= 0.0) continue;
        sup_g = std::max(sup_g, econ.growth(R));
    }
    return std::max(10.0, 2.0 * sup_g);
}

enum class NecessityStatus {
    FundamentalEliminated,        // R < G_d < G: fundamental-value pricing is impossible
    RateNotBelowDividendGrowth,   // R >= G_d
    DividendsNotNegligible,       // G_d >= G
    BothViolated,
};

constexpr const char* to_string(NecessityStatus s) noexcept {
    switch (s) {
        case NecessityStatus::FundamentalEliminated: return "FundamentalEliminated";
        case NecessityStatus::RateNotBelowDividendGrowth: return "RateNotBelowDividendGrowth";
        case NecessityStatus::DividendsNotNegligible: return "DividendsNotNegligible";
        case NecessityStatus::BothViolated: return "BothViolated";
    }
    return "Unknown";
}

struct NecessityVerdict {
    NecessityStatus status = NecessityStatus::BothViolated;
    double R_limit = 0.0;
    double G_d = 0.0;
    double G = 0.0;

    [[nodiscard]] bool eliminated() const { return status == NecessityStatus::FundamentalEliminated; }
};

// Dividend-injection test: with dividends growing at G_d, an equilibrium
// whose interest rate converges to R_limit cannot price the asset at
// fundamental value when R_limit < G_d (present value diverges) while
// G_d < G keeps the dividends asymptotically negligible.
inline NecessityVerdict check_necessity(double R_limit, double G_d, double G) {
    if (!(R_limit > 0.0) || !(G_d > 0.0) || !(G > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "rates must be positive");
    NecessityVerdict v;
    v.R_limit = R_limit;
    v.G_d = G_d;
    v.G = G;
    bool below = R_limit < G_d;
    bool negligible = G_d < G;
    if (below && negligible)
        v.status = NecessityStatus::FundamentalEliminated;
    else if (!below && !negligible)
        v.status = NecessityStatus::BothViolated;
    else if (!below)
        v.status = NecessityStatus::RateNotBelowDividendGrowth;
    else
        v.status = NecessityStatus::DividendsNotNegligible;
    return v;
}

// Bubbly equilibrium of the reduced form: interest rate R_b with
// G(R_b) = R_b and asset price P_t = p W_0 R_b^t, p = s(R_b).
struct BubbleSolution {
    double R_f = 0.0;
    double R_b = 0.0;
    double saving_rate_at_Rb = 0.0;
    bool saving_ambiguous = false;

    // Price level at time t for initial wealth W0. Built by repeated
    // multiplication so that price(t+1) == price(t) * R_b holds bitwise.
    [[nodiscard]] double price(int t, double W0) const {
        double p = saving_rate_at_Rb * W0;
        for (int k = 0; k < t; ++k) p *= R_b;
        return p;
    }
};

inline BubbleSolution solve_bubble(const ReducedFormEconomy& econ, double bracket_lo,
                                   double bracket_hi, double tol_fundamental = 1e-12,
                                   double tol_bubbly = 1e-10, double upper = 0.0) {
    BubbleSolution sol;
    sol.R_f = solve_fundamental_rate(econ, bracket_lo, bracket_hi, tol_fundamental);
    if (upper <= 0.0) upper = default_bubbly_upper(econ, sol.R_f);
    sol.R_b = solve_bubbly_rate(econ, sol.R_f, upper, tol_bubbly);
    Interval s = econ.saving(sol.R_b);
    sol.saving_ambiguous = s.ambiguous();
    sol.saving_rate_at_Rb = s.midpoint();
    if (!(sol.saving_rate_at_Rb > 0.0))
        throw ToolkitError(ErrorCode::NoBubblyEquilibrium,
                           "saving rate at R_b is not strictly positive: " +
                               std::to_string(sol.saving_rate_at_Rb));
    return sol;
}

// Sampling-based continuity check of G on [lo, hi]: flags any jump between
// adjacent samples larger than the declared modulus bound.
inline bool growth_continuous_on(const ReducedFormEconomy& econ, double lo, double hi,
                                 int samples = 1000) {
    double prev = econ.growth(lo);
    for (int i = 1; i <= samples; ++i) {
        double R = lo + (hi - lo) * i / samples;
        double cur = econ.growth(R);
        if (!std::isfinite(cur) || std::abs(cur - prev) > econ.growth_jump_bound) return false;
        prev = cur;
    }
    return true;
}

// Sampling-based check of the growth assumption G(R) < R above the declared
// threshold.
inline bool growth_below_diagonal_above(const ReducedFormEconomy& econ, double threshold, double hi,
                                        int samples = 200) {
    for (int i = 0; i <= samples; ++i) {
        double R = threshold + (hi - threshold) * i / samples;
        if (R <= 0.0) continue;
        if (econ.growth(R) >= R) return false;
    }
    return true;
}

}  // namespace bubblesolve::reduced
